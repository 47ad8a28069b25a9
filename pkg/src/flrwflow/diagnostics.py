"""Rescaled variables, steady-state residuals, error norms and velocity indicators."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FluidParams


class GridMismatchError(ValueError):
    """The two snapshots cannot be placed on a common grid."""


@dataclass(frozen=True)
class RescaleExponents:
    """Powers of |t| that turn decaying or blowing-up fields into finite profiles."""

    alpha: float
    beta: float | None
    regime: str

    @classmethod
    def for_regime(cls, regime: str, params: FluidParams) -> "RescaleExponents":
        e2k2 = params.eps**2 * params.k**2
        if regime == "expanding":
            if 3.0 * e2k2 >= 1.0:
                raise ValueError("expanding rescaling needs k < 1/(eps sqrt 3)")
            return cls(params.kappa * (1 + 3 * e2k2), params.kappa * (1 - 3 * e2k2), regime)
        if regime == "contracting":
            # No velocity exponent is available in this regime; see velocity_indicators.
            return cls(2.0 * params.kappa, None, regime)
        raise ValueError(f"no rescaling for regime {regime!r}")


def rescale_expanding(q: np.ndarray, t: float, params: FluidParams):
    """Return (rho_tilde, u_tilde) = (t^alpha rho, t^beta u) for t > 0."""
    if t <= 0:
        raise ValueError(f"expanding rescaling needs t > 0, got t={t}")
    ex = RescaleExponents.for_regime("expanding", params)
    q = np.asarray(q, float)
    return t**ex.alpha * q[0], t**ex.beta * q[1:]


def unscale_expanding(rho_tilde, u_tilde, t: float, params: FluidParams):
    ex = RescaleExponents.for_regime("expanding", params)
    return t**-ex.alpha * np.asarray(rho_tilde), t**-ex.beta * np.asarray(u_tilde)


def rescale_contracting(q: np.ndarray, t: float, params: FluidParams) -> np.ndarray:
    """Return |t|^(2 kappa) rho for t < 0."""
    if t >= 0:
        raise ValueError(f"contracting rescaling needs t < 0, got t={t}")
    ex = RescaleExponents.for_regime("contracting", params)
    return abs(t) ** ex.alpha * np.asarray(q, float)[0]


def velocity_indicators(q: np.ndarray, params: FluidParams) -> np.ndarray:
    """Distance of each velocity component to the nearest of {-1/eps, 0, 1/eps}.

    With eps = 0 the only finite target is 0.
    """
    u = np.asarray(q, float)[1:]
    d = np.abs(u)
    if params.eps > 0:
        c = 1.0 / params.eps
        d = np.minimum(d, np.minimum(np.abs(u - c), np.abs(u + c)))
    return d


def steady_residual(q: np.ndarray, b: np.ndarray):
    """Fit rho = C b^2, u = 0 and return (C, max|rho/(C b^2) - 1| + max|velocity|)."""
    q = np.asarray(q, float)
    b = np.asarray(b, float)
    if np.any(b <= 0):
        raise ValueError("the geometry profile must be positive")
    ratio = q[0] / b**2
    c_fit = float(np.mean(ratio))
    if c_fit == 0:
        return 0.0, float(np.inf)
    residual = float(np.max(np.abs(ratio / c_fit - 1.0)))
    for comp in q[1:]:
        residual += float(np.max(np.abs(comp)))
    return c_fit, residual


def spread(field: np.ndarray) -> float:
    """(max - min) / mean of a positive field."""
    f = np.asarray(field, float)
    return float((f.max() - f.min()) / f.mean())


def _restrict_axis(f: np.ndarray, n: int, axis: int) -> np.ndarray:
    """Average piecewise-constant cells onto ``n`` equal cells of [0, 1] along ``axis``."""
    f = np.moveaxis(np.asarray(f, float), axis, -1)
    m = f.shape[-1]
    if m == n:
        return np.moveaxis(f.copy(), -1, axis)
    if m < n:
        raise GridMismatchError(f"cannot restrict {m} cells onto a finer grid of {n}")
    if m % n == 0:
        out = f.reshape(f.shape[:-1] + (n, m // n)).mean(axis=-1)
    else:
        # The running integral of a piecewise-constant field is piecewise linear,
        # so linear interpolation at the coarse edges is exact.
        fine_edges = np.linspace(0.0, 1.0, m + 1)
        cum = np.concatenate([np.zeros(f.shape[:-1] + (1,)), np.cumsum(f, axis=-1) / m], axis=-1)
        coarse_edges = np.linspace(0.0, 1.0, n + 1)
        flat = cum.reshape(-1, m + 1)
        at = np.array([np.interp(coarse_edges, fine_edges, row) for row in flat])
        out = (np.diff(at, axis=-1) * n).reshape(f.shape[:-1] + (n,))
    return np.moveaxis(out, -1, axis)


def restrict(field: np.ndarray, shape) -> np.ndarray:
    """Cell-average restriction of a component-first field onto a coarser grid."""
    out = np.asarray(field, float)
    if out.ndim - 1 != len(shape):
        raise GridMismatchError(f"field of shape {out.shape} does not match grid {tuple(shape)}")
    for axis, n in enumerate(shape):
        out = _restrict_axis(out, n, axis + 1)
    return out


def error_norms(candidate: np.ndarray, reference: np.ndarray):
    """Per-component (L1, Linf) of candidate minus the reference restricted to its grid.

    L1 is weighted by the cell volume, so a constant offset c gives L1 = c.
    """
    cand = np.asarray(candidate, float)
    ref = np.asarray(reference, float)
    if cand.shape[0] != ref.shape[0] or cand.ndim != ref.ndim:
        raise GridMismatchError(f"incompatible snapshots {cand.shape} and {ref.shape}")
    err = np.abs(cand - restrict(ref, cand.shape[1:]))
    axes = tuple(range(1, err.ndim))
    return err.mean(axis=axes), err.max(axis=axes)
