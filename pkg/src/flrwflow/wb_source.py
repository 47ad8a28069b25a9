"""Interface discretisations of the geometric source and the cell-centred expansion source."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FluidParams, GeometryProfile

ALPHA_SRC_DEFAULT = 100.0

WELL_BALANCED = 0
FALLBACK = 1
VACUUM_ZERO = 2
BRANCH_NAMES = {WELL_BALANCED: "well_balanced", FALLBACK: "fallback", VACUUM_ZERO: "vacuum_zero"}


@dataclass
class SourceDiscretization:
    s_hat1: np.ndarray
    branch: np.ndarray

    def branch_names(self):
        return np.vectorize(BRANCH_NAMES.get)(self.branch)


def _mean_speed_sq(qL, qR):
    """Squared magnitude of the arithmetic mean velocity across the interface."""
    u = 0.5 * (qL[1] + qR[1])
    v2 = u * u
    for i in range(2, qL.shape[0]):
        w = 0.5 * (qL[i] + qR[i])
        v2 = v2 + w * w
    return v2


def log_density_defect(rhoL, rhoR):
    """A(w_L, w_R) = ln(w_L / w_R) / w_LR - (1/w_R - 1/w_L) with w = 1/rho."""
    inv_wlr = 2.0 / (1.0 / rhoL + 1.0 / rhoR)
    return inv_wlr * np.log(rhoR / rhoL) - (rhoR - rhoL)


def wb_source_dx(qL, qR, BL, BR, params: FluidParams, alpha_src: float = ALPHA_SRC_DEFAULT):
    """Return (S1 * dx, branch) of the well-balanced source at each interface.

    ``qL``/``qR`` are primitive arrays, ``BL``/``BR`` the values of ln b at the
    two cell centres joined by the interface.
    """
    qL = np.asarray(qL, float)
    qR = np.asarray(qR, float)
    k2 = params.k**2
    rhoL, rhoR = qL[0], qR[0]
    dB = np.asarray(BR, float) - np.asarray(BL, float)
    factor = 1.0 - params.eps**2 * _mean_speed_sq(qL, qR)

    zeroL = rhoL <= 0
    zeroR = rhoR <= 0
    both_zero = zeroL & zeroR
    one_zero = zeroL ^ zeroR
    live = ~(zeroL | zeroR)

    sL = np.where(live, rhoL, 1.0)
    sR = np.where(live, rhoR, 1.0)
    inv_wlr = np.where(live, 2.0 / (1.0 / sL + 1.0 / sR), np.maximum(rhoL, rhoR))
    main = 2.0 * k2 * inv_wlr * factor * dB
    full = main - k2 * np.where(live, log_density_defect(sL, sR), 0.0)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(full / main)
    # dB == 0 makes the ratio infinite unless the defect vanishes as well
    ratio = np.where(main == 0, np.where(full == 0, 0.0, np.inf), ratio)
    keep = live & (ratio < alpha_src)

    s_dx = np.where(keep, full, main)
    s_dx = np.where(both_zero, 0.0, s_dx)
    branch = np.where(keep, WELL_BALANCED, FALLBACK)
    branch = np.where(both_zero, VACUUM_ZERO, np.where(one_zero, FALLBACK, branch))
    return s_dx, branch


def wb_source_1(qL, qR, xL, xR, dx: float, params: FluidParams, geom: GeometryProfile,
                alpha_src: float = ALPHA_SRC_DEFAULT) -> SourceDiscretization:
    """Well-balanced S1 for 1D interfaces between cell centres ``xL`` and ``xR``."""
    s_dx, branch = wb_source_dx(qL, qR, geom.log_b(xL), geom.log_b(xR), params, alpha_src)
    return SourceDiscretization(s_dx / dx, branch)


def centered_source_dx(qL, qR, BL, BR, params: FluidParams):
    """Non-balanced source (rho_L + rho_R) k^2 ln(b_R / b_L) (1 - eps^2 V_LR^2)."""
    qL = np.asarray(qL, float)
    qR = np.asarray(qR, float)
    factor = 1.0 - params.eps**2 * _mean_speed_sq(qL, qR)
    return (qL[0] + qR[0]) * params.k**2 * (np.asarray(BR) - np.asarray(BL)) * factor


def time_source_q(q, t: float, geom: GeometryProfile, params: FluidParams, paper_literal_q1: bool = False):
    """Cell-centred expansion source Q evaluated at the cell value and time ``t``.

    With ``paper_literal_q1`` the momentum components carry an extra k^2 factor.
    """
    q = np.asarray(q, float)
    eps, k, c = params.eps, params.k, params.c
    h = geom.expansion_rate(t, params.kappa)
    rho = q[0]
    v2 = q[1] ** 2
    for i in range(2, q.shape[0]):
        v2 = v2 + q[i] ** 2
    Q = np.empty_like(q)
    Q[0] = -h * rho * (1.0 + 3 * eps**2 * k**2 + (1.0 - eps**2 * k**2) * eps**2 * v2)
    mom = k**2 if paper_literal_q1 else 1.0
    for i in range(1, q.shape[0]):
        Q[i] = -2.0 * mom * h * rho * c * q[i]
    return Q
