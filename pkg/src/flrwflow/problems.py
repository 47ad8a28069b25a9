"""Built-in geometry profiles and initial data of the reference experiments."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .model import GeometryProfile, flat_geometry

TWO_PI = 2.0 * np.pi


# -- geometry profiles -------------------------------------------------------

def _bxa(x):
    return 1.0 + 0.01 * np.sin(TWO_PI * x)


def _bxa_x(x):
    return 0.01 * TWO_PI * np.cos(TWO_PI * x)


def _bxb(x):
    return 1.0 + 0.01 * (np.sin(6 * np.pi * x) + np.cos(TWO_PI * x))


def _bxb_x(x):
    return 0.01 * (6 * np.pi * np.cos(6 * np.pi * x) - TWO_PI * np.sin(TWO_PI * x))


def _bump(x, y):
    return np.exp(-20 * (x - 0.5) ** 2 - 20 * (y - 0.5) ** 2)


def _bxy(x, y):
    return 0.1 + 0.01 * _bump(x, y)


def _bxy_x(x, y):
    return 0.01 * _bump(x, y) * (-40 * (x - 0.5))


def _bxy_y(x, y):
    return 0.01 * _bump(x, y) * (-40 * (y - 0.5))


def geometry(name: str, regime: str = "expanding") -> GeometryProfile:
    """Look up a background profile: flat, flat2d, bxa, bxb or bxy2d."""
    if name == "flat":
        return flat_geometry(1, regime)
    if name == "flat2d":
        return flat_geometry(2, regime)
    if name == "bxa":
        return GeometryProfile("bxa", 1, _bxa, (_bxa_x,), regime)
    if name == "bxb":
        return GeometryProfile("bxb", 1, _bxb, (_bxb_x,), regime)
    if name == "bxy2d":
        return GeometryProfile("bxy2d", 2, _bxy, (_bxy_x, _bxy_y), regime)
    raise KeyError(f"unknown geometry {name!r}")


GEOMETRIES = ("flat", "flat2d", "bxa", "bxb", "bxy2d")


# -- initial data ------------------------------------------------------------
# Each sampler maps cell-centre coordinates to a primitive array (rho, u[, v]).

def riemann_jump(x):
    rho = np.where(x <= 0.5, 1.0, 0.9)
    return np.array([rho, np.zeros_like(rho)])


def oscillatory_density(x):
    rho = 1.0 + np.sin(6.0 / 7.0 * np.pi * x) * np.cos(3.5 * np.pi * x)
    return np.array([rho, np.zeros_like(rho)])


def steady_b2(b):
    def sample(*coords):
        rho = b(*coords) ** 2
        zero = np.zeros_like(rho)
        return np.array([rho] + [zero] * len(coords))
    return sample


def perturbed_steady(b):
    def sample(x):
        rho = b(x) ** 2 + np.where((x >= 0.2) & (x <= 0.7), 0.02 * np.cos(30 * np.pi * x), 0.0)
        return np.array([rho, np.zeros_like(rho)])
    return sample


def gaussian_2d(x, y):
    rho = 0.1 + 0.1 * np.exp(-20 * (x - 0.5) ** 2 - 20 * (y - 0.5) ** 2)
    zero = np.zeros_like(rho)
    return np.array([rho, zero, zero])


def trig_product_2d(x, y):
    rho = 1.0 + 0.01 * (np.sin(TWO_PI * x) * np.cos(TWO_PI * x) * np.sin(TWO_PI * y) * np.cos(TWO_PI * y))
    zero = np.zeros_like(rho)
    return np.array([rho, zero, zero])


@dataclass(frozen=True)
class Problem:
    """A named experiment: initial data, background and default run parameters."""

    name: str
    description: str
    dim: int
    geometry: str
    regime: str
    make_initial: Callable[[GeometryProfile], Callable]
    defaults: dict = field(default_factory=dict)

    def build_geometry(self) -> GeometryProfile:
        return geometry(self.geometry, self.regime)

    def initial(self, geom: GeometryProfile | None = None) -> Callable:
        return self.make_initial(geom or self.build_geometry())


def _fixed(fn):
    return lambda geom: fn


def _from_b(factory):
    return lambda geom: factory(geom.b)


_EXPANDING_1D = dict(eps=1.0, kappa=2.0, t0=1.0, cfl=0.3, integrator="rk4", space_order=2, scheme="hll")
_2D = dict(eps=1.0, k=0.5, kappa=2.0, cfl=0.3, integrator="ssprk3", space_order=2, N=100, Ny=100)

PROBLEMS = {
    p.name: p
    for p in [
        Problem("expanding_riemann", "single density jump 1 / 0.9 at x = 0.5, expanding, b = 1", 1,
                "flat", "expanding", _fixed(riemann_jump),
                dict(_EXPANDING_1D, k=0.7, N=100, t_end=1.1)),
        Problem("oscillatory_density", "rho = 1 + sin(6 pi x / 7) cos(7 pi x / 2), expanding, b = 1", 1,
                "flat", "expanding", _fixed(oscillatory_density),
                dict(_EXPANDING_1D, k=0.5, N=500, t_end=50.0, snapshots="2,5,10,50")),
        Problem("steady_b2", "steady state rho = b^2, u = 0 with a = 1", 1,
                "bxa", "static", _from_b(steady_b2),
                dict(eps=1.0, k=0.5, kappa=2.0, t0=1.0, t_end=10.0, N=100, cfl=0.6,
                     allow_cfl_above_half=True, scheme="wb_hll", integrator="rk4", space_order=2)),
        Problem("perturbed_steady", "rho = b^2 + 0.02 cos(30 pi x) on [0.2, 0.7] with a = 1", 1,
                "bxb", "static", _from_b(perturbed_steady),
                dict(eps=1.0, k=0.5, kappa=2.0, t0=1.0, t_end=10.0, N=100, cfl=0.3,
                     scheme="wb_hll", integrator="rk4", space_order=2)),
        Problem("perturbed_steady_expanding", "perturbed steady data on an expanding background", 1,
                "bxb", "expanding", _from_b(perturbed_steady),
                dict(_EXPANDING_1D, k=0.5, N=100, t_end=20.0, scheme="wb_hll", snapshots="10,20")),
        Problem("contracting_oscillatory", "oscillatory density on a contracting background, b = 1", 1,
                "flat", "contracting", _fixed(oscillatory_density),
                dict(eps=1.0, k=0.5, kappa=2.0, t0=-1.0, t_end=-1e-6, N=500, cfl=0.3,
                     integrator="rk4", space_order=2, scheme="hll", snapshots="-1e-2,-1e-4,-1e-6")),
        Problem("contracting_steady_b2", "rho = b^2 on a contracting background", 1,
                "bxb", "contracting", _from_b(steady_b2),
                dict(eps=1.0, k=0.3, kappa=2.0, t0=-1.0, t_end=-1e-7, N=500, cfl=0.3,
                     integrator="rk4", space_order=2, scheme="wb_hll")),
        Problem("gaussian_2d", "Gaussian bump 0.1 + 0.1 exp(-20 r^2), expanding, b = 1", 2,
                "flat2d", "expanding", _fixed(gaussian_2d),
                dict(_2D, t0=1.0, t_end=60.0, scheme="hll", snapshots="8,16,50,60")),
        Problem("symmetric_2d_static", "trigonometric product data over the 2D bump geometry, a = 1", 2,
                "bxy2d", "static", _fixed(trig_product_2d),
                dict(_2D, t0=1.0, t_end=60.0, scheme="wb_hll", snapshots="8,16,50,60")),
        Problem("symmetric_2d_expanding", "trigonometric product data over the 2D bump geometry, expanding", 2,
                "bxy2d", "expanding", _fixed(trig_product_2d),
                dict(_2D, t0=1.0, t_end=60.0, scheme="wb_hll", snapshots="8,16,50,60")),
        Problem("symmetric_2d_contracting", "trigonometric product data, contracting, b = 1", 2,
                "flat2d", "contracting", _fixed(trig_product_2d),
                dict(_2D, t0=-1.0, t_end=-1e-5, scheme="hll", snapshots="-0.5,-1e-1,-1e-3,-1e-5")),
        Problem("symmetric_2d_contracting_bxy", "trigonometric product data over the 2D bump, contracting", 2,
                "bxy2d", "contracting", _fixed(trig_product_2d),
                dict(_2D, t0=-1.0, t_end=-1e-8, scheme="wb_hll", snapshots="-1e-1,-1e-3,-1e-5,-1e-8")),
    ]
}


def builtin_initial_condition(name: str, geom: GeometryProfile | None = None) -> Callable:
    """Return the cell-centre sampler of a named experiment."""
    try:
        problem = PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown initial condition {name!r}; known: {', '.join(PROBLEMS)}") from None
    return problem.initial(geom)
