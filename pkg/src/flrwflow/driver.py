"""Semi-discrete right-hand sides, 2D direction-by-direction sweeps and the time loop."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .model import (
    FluidParams,
    GeometryProfile,
    GridState,
    RecoveryError,
    cons_to_prim,
    physical_flux,
    prim_to_cons,
    shift_left,
    shift_right,
)
from .reconstruction import (
    M_HIGH_DEFAULT,
    M_LOW_DEFAULT,
    interface_values,
    minmod_slopes,
    positive_phi,
    steady_deviation,
)
from .riemann import THETA_DEFAULT, source_intermediate_states, wb_flux, wb_intermediate_states
from .timestep import INTEGRATORS, StepControl, compute_dt
from .wb_source import ALPHA_SRC_DEFAULT, centered_source_dx, time_source_q, wb_source_dx

log = logging.getLogger(__name__)

SCHEMES = ("hll", "wb_hll")


class SimulationError(RuntimeError):
    """A run aborted on a non-finite value or a failed primitive recovery."""

    def __init__(self, message: str, t: float, cell=None, quantity: str | None = None):
        super().__init__(f"{message} (t={t!r}, cell={cell}, quantity={quantity})")
        self.t = t
        self.cell = cell
        self.quantity = quantity


@dataclass(frozen=True)
class SchemeOptions:
    scheme: str = "wb_hll"
    space_order: int = 2
    theta: float = THETA_DEFAULT
    alpha_src: float = ALPHA_SRC_DEFAULT
    m: float = M_LOW_DEFAULT
    M: float = M_HIGH_DEFAULT
    paper_literal_psi: bool = False
    paper_literal_q1: bool = False
    fluxes: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.space_order not in (1, 2):
            raise ValueError("space_order must be 1 or 2")
        if self.theta < 0:
            raise ValueError("theta must be non-negative")
        if self.alpha_src <= 0:
            raise ValueError("alpha_src must be positive")
        if not 0 < self.m < self.M:
            raise ValueError("need 0 < m < M")


def sweep(q: np.ndarray, B: np.ndarray, dx: float, params: FluidParams, opts: SchemeOptions,
          flat: bool = False) -> np.ndarray:
    """Flux divergence plus interface source along the last axis.

    ``q`` holds primitives with the velocity normal to the sweep in component 1;
    ``B`` is ln b at the cell centres.  Returns the contribution to dU/dt in the
    same component order.
    """
    BR = shift_left(B)
    wb = opts.scheme == "wb_hll"
    if opts.space_order == 2:
        slopes = minmod_slopes(q, dx)
        if wb:
            if flat:
                s_cells = np.zeros(q.shape[1:])
            else:
                s_cells, _ = wb_source_dx(q, shift_left(q), B, BR, params, opts.alpha_src)
            phi = steady_deviation(q, s_cells, dx, params, opts.m, opts.M, opts.paper_literal_psi)
        else:
            phi = np.ones(q.shape[1:])
        phi = positive_phi(q, slopes, phi, dx)
        qL, qR = interface_values(q, slopes, phi, dx)
    else:
        qL, qR = q, shift_left(q)

    UL = prim_to_cons(qL, params, check=False)
    UR = prim_to_cons(qR, params, check=False)
    FL = physical_flux(qL, params)
    FR = physical_flux(qR, params)

    if flat:
        s_dx = np.zeros(q.shape[1:])
    elif wb:
        s_dx, _ = wb_source_dx(qL, qR, B, BR, params, opts.alpha_src)
    else:
        s_dx = centered_source_dx(qL, qR, B, BR, params)

    if wb:
        inter = wb_intermediate_states(UL, UR, s_dx, 1.0, params, opts.theta, qL, qR, FL=FL, FR=FR)
    else:
        inter = source_intermediate_states(UL, UR, s_dx, 1.0, params, qL, qR, FL, FR)
    flux = wb_flux(UL, UR, inter, params, FL, FR)

    out = -(flux - shift_right(flux)) / dx
    out[1] += 0.5 * (s_dx + shift_right(s_dx)) / dx
    return out


def _recover(U: np.ndarray, params: FluidParams, t: float) -> np.ndarray:
    try:
        return cons_to_prim(U, params)
    except RecoveryError as exc:
        raise SimulationError("primitive recovery failed", t, cell=exc.cells, quantity="U") from exc


class SemiDiscrete:
    """dU/dt = -(F_{i+1/2} - F_{i-1/2})/dx + P_i + Q_i on a periodic grid."""

    def __init__(self, shape: Sequence[int], params: FluidParams, geom: GeometryProfile,
                 opts: SchemeOptions = SchemeOptions()):
        self.shape = tuple(shape)
        self.dim = len(self.shape)
        if geom.dim != self.dim:
            raise ValueError(f"geometry is {geom.dim}D but the grid is {self.dim}D")
        self.params = params
        self.geom = geom
        self.opts = opts
        centers = [(np.arange(n) + 0.5) / n for n in self.shape]
        mesh = np.meshgrid(*centers, indexing="ij")
        self.B = geom.log_b(*mesh)
        self.h = [1.0 / n for n in self.shape]
        self.calls = 0

    def __call__(self, U: np.ndarray, t: float) -> np.ndarray:
        self.calls += 1
        q = _recover(U, self.params, t)
        out = np.zeros_like(U)
        if self.opts.fluxes:
            if self.dim == 1:
                out += sweep(q, self.B, self.h[0], self.params, self.opts, self.geom.flat)
            else:
                out += self._sweep_x(q) + self._sweep_y(q)
        if self.geom.regime != "static":
            out += time_source_q(q, t, self.geom, self.params, self.opts.paper_literal_q1)
        return out

    def _sweep_x(self, q):
        qx = np.ascontiguousarray(q.swapaxes(1, 2))
        Bx = np.ascontiguousarray(self.B.T)
        r = sweep(qx, Bx, self.h[0], self.params, self.opts, self.geom.flat)
        return r.swapaxes(1, 2)

    def _sweep_y(self, q):
        qy = q[[0, 2, 1]]
        r = sweep(qy, self.B, self.h[1], self.params, self.opts, self.geom.flat)
        return r[[0, 2, 1]]


def sweep_2d(grid: GridState, dt: float, rhs: SemiDiscrete, integrator: str = "ssprk3") -> GridState:
    """Advance a 2D grid by one step; each stage sums the x- and y-sweeps and Q."""
    if grid.dim != 2:
        raise ValueError("sweep_2d needs a 2D grid")
    U = INTEGRATORS[integrator](grid.U, grid.t, dt, rhs)
    return GridState(U, grid.t + dt, 2)


@dataclass
class Snapshot:
    t: float
    q: np.ndarray
    U: np.ndarray
    step: int
    requested: Optional[float] = None


@dataclass
class RunSpec:
    params: FluidParams
    geom: GeometryProfile
    initial: Callable[..., np.ndarray]
    shape: tuple
    t0: float
    t_end: float
    opts: SchemeOptions = field(default_factory=SchemeOptions)
    integrator: str = "rk4"
    cfl: float = 0.3
    contracting_guard: float = 0.5
    allow_cfl_above_half: bool = False
    snapshot_times: tuple = ()
    name: str = "custom"

    def __post_init__(self):
        self.shape = tuple(int(n) for n in self.shape)
        self.snapshot_times = tuple(sorted(float(s) for s in self.snapshot_times))
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if len(self.shape) not in (1, 2) or min(self.shape) < 3:
            raise ValueError("need 1 or 2 axes with at least 3 cells each")
        if self.t_end < self.t0:
            raise ValueError("t_end must not precede t0")
        regime = self.geom.regime
        if regime == "expanding" and self.t0 <= 0:
            raise ValueError("expanding runs start at t0 > 0")
        if regime == "contracting" and not (self.t0 < 0 and self.t_end < 0):
            raise ValueError("contracting runs live in t < 0")
        for s in self.snapshot_times:
            if not self.t0 < s <= self.t_end:
                raise ValueError(f"snapshot time {s} outside ({self.t0}, {self.t_end}]")
        StepControl(self.cfl, self.t_end, self.contracting_guard,
                    allow_cfl_above_half=self.allow_cfl_above_half)

    @property
    def dim(self) -> int:
        return len(self.shape)

    def centers(self):
        return tuple((np.arange(n) + 0.5) / n for n in self.shape)

    def initial_grid(self) -> GridState:
        mesh = np.meshgrid(*self.centers(), indexing="ij")
        q = np.asarray(self.initial(*mesh), float)
        return GridState(prim_to_cons(q, self.params), self.t0, self.dim)


@dataclass
class RunResult:
    spec: RunSpec
    initial: Snapshot
    final: GridState
    snapshots: list
    steps: int

    @property
    def final_q(self) -> np.ndarray:
        return cons_to_prim(self.final.U, self.spec.params)


def run(spec: RunSpec, sink: Callable[[Snapshot], None] | None = None,
        max_steps: int | None = None) -> RunResult:
    """Integrate ``spec`` from t0 to t_end, emitting snapshots at the first step time at or past each request."""
    params = spec.params
    rhs = SemiDiscrete(spec.shape, params, spec.geom, spec.opts)
    step = INTEGRATORS[spec.integrator]
    ctrl = StepControl(spec.cfl, spec.t_end, spec.contracting_guard,
                       allow_cfl_above_half=spec.allow_cfl_above_half)
    grid = spec.initial_grid()
    first = Snapshot(grid.t, cons_to_prim(grid.U, params), grid.U.copy(), 0)
    pending = list(spec.snapshot_times)
    snaps = []
    n = 0
    while grid.t < spec.t_end:
        dt = compute_dt(grid, ctrl, params, source_active=spec.geom.regime != "static")
        if dt <= 0:
            raise SimulationError("non-positive time step", grid.t)
        U = step(grid.U, grid.t, dt, rhs)
        t_new = spec.t_end if dt >= spec.t_end - grid.t else grid.t + dt
        bad = ~np.isfinite(U)
        if bad.any():
            idx = np.argwhere(bad)[0]
            raise SimulationError("non-finite state", t_new, cell=tuple(idx[1:]), quantity=f"U{idx[0]}")
        grid = GridState(U, t_new, spec.dim)
        n += 1
        if pending and grid.t >= pending[0]:
            q = _recover(grid.U, params, grid.t)
            while pending and grid.t >= pending[0]:
                snap = Snapshot(grid.t, q, grid.U.copy(), n, pending.pop(0))
                snaps.append(snap)
                if sink is not None:
                    sink(snap)
        if max_steps is not None and n >= max_steps:
            break
    log.debug("run %s finished after %d steps (%d rhs calls)", spec.name, n, rhs.calls)
    return RunResult(spec, first, grid, snaps, n)
