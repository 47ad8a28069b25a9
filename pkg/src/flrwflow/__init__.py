"""Well-balanced finite volume solver for isothermal relativistic flows on FLRW-type backgrounds."""
from .driver import RunResult, RunSpec, SchemeOptions, SemiDiscrete, SimulationError, run, sweep_2d
from .model import FluidParams, GeometryProfile, GridState, cons_to_prim, prim_to_cons
from .problems import PROBLEMS, builtin_initial_condition, geometry

__all__ = [
    "FluidParams", "GeometryProfile", "GridState", "PROBLEMS", "RunResult", "RunSpec", "SchemeOptions",
    "SemiDiscrete", "SimulationError", "builtin_initial_condition", "cons_to_prim", "geometry",
    "prim_to_cons", "run", "sweep_2d",
]
