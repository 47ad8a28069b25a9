"""Relativistic isothermal Euler system on an FLRW-type background.

States are stored component-first: a primitive array ``q`` has shape
``(1 + d, ...)`` holding ``(rho, u[, v])`` and a conservative array ``U`` has
the same shape holding ``(U0, U1[, U2])``.  All formulas are written so that
the two-dimensional expressions evaluated with ``v == 0`` produce bit-for-bit
the one-dimensional ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

DISCRIMINANT_TOL = 1e-12


class AdmissibilityError(ValueError):
    """Raised for states outside the admissible set (rho < 0, |u| >= 1/eps)."""


class RecoveryError(ArithmeticError):
    """Raised when a conservative state cannot be inverted to primitives."""

    def __init__(self, message: str, cells=None, t: float | None = None):
        super().__init__(message)
        self.cells = cells
        self.t = t


@dataclass(frozen=True)
class FluidParams:
    """Model constants: inverse light speed ``eps``, sound speed ``k``, expansion exponent ``kappa``."""

    eps: float = 1.0
    k: float = 0.5
    kappa: float = 2.0

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError(f"eps must be non-negative, got {self.eps}")
        if self.k <= 0:
            raise ValueError(f"sound speed k must be positive, got {self.k}")
        if self.eps > 0 and self.k * self.eps >= 1.0:
            raise ValueError(f"sound speed k={self.k} must be below the light speed 1/eps={1 / self.eps}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    @property
    def c(self) -> float:
        """The recurring factor 1 + eps^2 k^2."""
        return 1.0 + self.eps**2 * self.k**2

    @property
    def light_speed(self) -> float:
        return np.inf if self.eps == 0 else 1.0 / self.eps


REGIMES = ("expanding", "contracting", "static")


@dataclass(frozen=True)
class GeometryProfile:
    """Background geometry: scale factor a(t) = |t|^kappa and spatial profile b.

    ``b`` takes one coordinate array per dimension; ``grad`` holds the analytic
    partial derivatives of ``b`` in the same order.  ``regime == "static"``
    means a(t) = 1.
    """

    name: str
    dim: int
    b: Callable[..., np.ndarray]
    grad: tuple[Callable[..., np.ndarray], ...]
    regime: str = "expanding"
    flat: bool = False

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if len(self.grad) != self.dim:
            raise ValueError("need one derivative of b per dimension")

    @property
    def kind(self) -> str:
        return "homogeneous" if self.flat else "profiled"

    def with_regime(self, regime: str) -> "GeometryProfile":
        return GeometryProfile(self.name, self.dim, self.b, self.grad, regime, self.flat)

    def log_b(self, *coords) -> np.ndarray:
        return np.log(self.b(*coords))

    def expansion_rate(self, t: float, kappa: float) -> float:
        """Return (d a / d t) / a, which equals kappa / t for a = |t|^kappa."""
        if self.regime == "static":
            return 0.0
        if t == 0:
            raise ValueError("the scale factor |t|^kappa is singular at t = 0")
        return kappa / t

    def scale_factor(self, t: float, kappa: float) -> float:
        if self.regime == "static":
            return 1.0
        if t == 0:
            raise ValueError("the scale factor |t|^kappa is singular at t = 0")
        return abs(t) ** kappa


def _const_one(*coords):
    return np.ones(np.broadcast(*coords).shape) if len(coords) > 1 else np.ones_like(np.asarray(coords[0], float))


def _const_zero(*coords):
    return np.zeros(np.broadcast(*coords).shape) if len(coords) > 1 else np.zeros_like(np.asarray(coords[0], float))


def flat_geometry(dim: int = 1, regime: str = "expanding") -> GeometryProfile:
    return GeometryProfile("flat", dim, _const_one, (_const_zero,) * dim, regime, flat=True)


def shift_left(a: np.ndarray) -> np.ndarray:
    """Periodic shift along the last axis: result[..., i] = a[..., i + 1]."""
    return np.concatenate((a[..., 1:], a[..., :1]), axis=-1)


def shift_right(a: np.ndarray) -> np.ndarray:
    """Periodic shift along the last axis: result[..., i] = a[..., i - 1]."""
    return np.concatenate((a[..., -1:], a[..., :-1]), axis=-1)


# ---------------------------------------------------------------------------
# conversions


def _velocity_squares(q: np.ndarray, normal: int = 1):
    """Return (V^2, transverse part of V^2) for a primitive array."""
    un2 = q[normal] ** 2
    others = [i for i in range(1, q.shape[0]) if i != normal]
    if not others:
        return un2, 0.0
    trans = q[others[0]] ** 2
    for i in others[1:]:
        trans = trans + q[i] ** 2
    return un2 + trans, trans


def check_admissible(q: np.ndarray, params: FluidParams) -> None:
    q = np.asarray(q, float)
    if np.any(q[0] < 0):
        raise AdmissibilityError("negative density")
    if params.eps > 0:
        v2, _ = _velocity_squares(q)
        if np.any(v2 * params.eps**2 >= 1.0):
            raise AdmissibilityError("velocity reaches the light speed 1/eps")


def prim_to_cons(q, params: FluidParams, check: bool = True) -> np.ndarray:
    """Map (rho, u[, v]) to (rho(1 + eps^4 k^2 V^2), rho u c[, rho v c])."""
    q = np.asarray(q, float)
    if check:
        check_admissible(q, params)
    eps, k = params.eps, params.k
    rho = q[0]
    v2, _ = _velocity_squares(q)
    U = np.empty_like(q)
    U[0] = rho * (1.0 + eps**4 * k**2 * v2)
    U[1:] = rho * q[1:] * params.c
    return U


def speed_from_ratio(r, params: FluidParams) -> np.ndarray:
    """Invert r = U1/U0 for the velocity (the minus-sign root, rationalized).

    The root (c - sqrt(D)) / (2 eps^4 k^2 r) is evaluated as 2 r / (c + sqrt(D)),
    which is the same number without cancellation and is continuous at r = 0
    and at eps = 0.
    """
    r = np.asarray(r, float)
    c = params.c
    a = params.eps**4 * params.k**2
    disc = c * c - 4.0 * a * r * r
    bad = disc < -DISCRIMINANT_TOL
    if np.any(bad):
        raise RecoveryError("negative discriminant in primitive recovery", cells=np.argwhere(bad))
    disc = np.maximum(disc, 0.0)
    return 2.0 * r / (c + np.sqrt(disc))


def cons_to_prim(U, params: FluidParams) -> np.ndarray:
    """Recover (rho, u[, v]) from conservative variables.

    U0 == 0 gives vacuum, a vanishing momentum gives (U0, 0), otherwise the
    speed is recovered from the momentum magnitude and the velocity is aligned
    with the momentum.  Negative U0 is treated as an error.
    """
    U = np.asarray(U, float)
    U0 = U[0]
    if np.any(U0 < 0):
        raise RecoveryError("negative U0 in primitive recovery", cells=np.argwhere(U0 < 0))
    q = np.zeros_like(U)
    d = U.shape[0] - 1
    if d == 1:
        mom = U[1]
    else:
        mom = np.sqrt(U[1] ** 2 + U[2] ** 2)
    live = U0 > 0
    safe_U0 = np.where(live, U0, 1.0)
    speed = np.where(live, speed_from_ratio(np.where(live, mom / safe_U0, 0.0), params), 0.0)
    q[0] = np.where(live, U0 / (1.0 + params.eps**4 * params.k**2 * speed * speed), 0.0)
    if d == 1:
        q[1] = speed
    else:
        moving = live & (mom > 0)
        safe_mom = np.where(moving, mom, 1.0)
        for i in range(1, d + 1):
            q[i] = np.where(moving, speed * (U[i] / safe_mom), 0.0)
    return q


def physical_flux(q, params: FluidParams, normal: int = 1) -> np.ndarray:
    """Flux of the conservative variables in the direction of velocity component ``normal``."""
    q = np.asarray(q, float)
    eps, k, c = params.eps, params.k, params.c
    rho, un = q[0], q[normal]
    _, trans = _velocity_squares(q, normal)
    F = np.empty_like(q)
    F[0] = rho * un * c
    for i in range(1, q.shape[0]):
        if i == normal:
            F[i] = rho * (un * un + k * k) - eps**2 * k**2 * rho * trans
        else:
            F[i] = c * rho * un * q[i]
    return F


def eigenvalues(u, params: FluidParams):
    """Characteristic speeds (u - k)/(1 - eps^2 k u) and (u + k)/(1 + eps^2 k u)."""
    u = np.asarray(u, float)
    e2k = params.eps**2 * params.k
    k = params.k
    return (u - k) / (1.0 - e2k * u), (u + k) / (1.0 + e2k * u)


def exact_source(q, coords: Sequence, t: float, geom: GeometryProfile, params: FluidParams) -> np.ndarray:
    """Pointwise source (S0, S1[, S2]) at positions ``coords`` and time ``t``."""
    q = np.asarray(q, float)
    eps, k, c = params.eps, params.k, params.c
    h = geom.expansion_rate(t, params.kappa)
    rho = q[0]
    v2, _ = _velocity_squares(q)
    S = np.empty_like(q)
    S[0] = -h * rho * (1.0 + 3 * eps**2 * k**2 + (1.0 - eps**2 * k**2) * eps**2 * v2)
    b = geom.b(*coords)
    for i in range(1, q.shape[0]):
        db_b = geom.grad[i - 1](*coords) / b
        S[i] = 2.0 * rho * (k**2 * db_b * (1.0 - eps**2 * v2) - h * c * q[i])
    return S


# ---------------------------------------------------------------------------
# 1D / 2D convenience wrappers


def prim_to_cons_1d(rho, u, params: FluidParams) -> np.ndarray:
    return prim_to_cons(np.array([rho, u], float), params)


def cons_to_prim_1d(U0, U1, params: FluidParams) -> np.ndarray:
    return cons_to_prim(np.array([U0, U1], float), params)


def flux_1d(U, params: FluidParams) -> np.ndarray:
    return physical_flux(cons_to_prim(U, params), params)


def prim_to_cons_2d(rho, u, v, params: FluidParams) -> np.ndarray:
    return prim_to_cons(np.array([rho, u, v], float), params)


def cons_to_prim_2d(U0, U1, U2, params: FluidParams) -> np.ndarray:
    return cons_to_prim(np.array([U0, U1, U2], float), params)


def flux_2d_x(U, params: FluidParams) -> np.ndarray:
    return physical_flux(cons_to_prim(U, params), params, normal=1)


def flux_2d_y(U, params: FluidParams) -> np.ndarray:
    return physical_flux(cons_to_prim(U, params), params, normal=2)


def exact_source_1d(q, x, t, geom: GeometryProfile, params: FluidParams) -> np.ndarray:
    return exact_source(q, (x,), t, geom, params)


def exact_source_2d(q, x, y, t, geom: GeometryProfile, params: FluidParams) -> np.ndarray:
    return exact_source(q, (x, y), t, geom, params)


@dataclass
class GridState:
    """Cell averages on the periodic unit torus.

    ``U`` has shape ``(2, N)`` in 1D and ``(3, Nx, Ny)`` in 2D (index order x, y).
    """

    U: np.ndarray
    t: float
    dim: int = 1
    shape: tuple = field(init=False)

    def __post_init__(self):
        self.U = np.asarray(self.U, float)
        if self.U.ndim != self.dim + 1 or self.U.shape[0] != self.dim + 1:
            raise ValueError(f"state array of shape {self.U.shape} does not fit dim={self.dim}")
        self.shape = self.U.shape[1:]

    @property
    def dx(self) -> float:
        return 1.0 / self.shape[0]

    @property
    def dy(self) -> float:
        return 1.0 / self.shape[-1]

    def centers(self):
        return tuple((np.arange(n) + 0.5) / n for n in self.shape)

    def primitives(self, params: FluidParams) -> np.ndarray:
        return cons_to_prim(self.U, params)

    def copy(self) -> "GridState":
        return GridState(self.U.copy(), self.t, self.dim)
