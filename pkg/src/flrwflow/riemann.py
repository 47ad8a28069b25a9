"""HLL wave-speed bounds, the two-wave HLL flux and the four-state well-balanced solver.

Every function is vectorised over interfaces: state arguments are arrays of
shape ``(ncomp, ...)`` and the velocity normal to the interface is component 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FluidParams, cons_to_prim, eigenvalues, physical_flux

THETA_DEFAULT = 1e-12
SONIC_TOL = 1e-10


@dataclass
class WaveSpeeds:
    lam_L: np.ndarray
    lam_R: np.ndarray


@dataclass
class IntermediateStates:
    um_minus: np.ndarray
    um_plus: np.ndarray
    s_hat1: np.ndarray
    lam_L: np.ndarray
    lam_R: np.ndarray
    clamped_both: np.ndarray | None = None


def wave_speeds(uL, uR, params: FluidParams) -> WaveSpeeds:
    l1L, l2L = eigenvalues(uL, params)
    l1R, l2R = eigenvalues(uR, params)
    lam_R = np.maximum(np.maximum(l2L, l2R), 0.0)
    lam_L = np.minimum(np.minimum(l1L, l1R), 0.0)
    return WaveSpeeds(lam_L, lam_R)


def hll_average(UL, UR, FL, FR, lam_L, lam_R):
    """Single HLL intermediate state (lamR UR - lamL UL - (FR - FL)) / (lamR - lamL)."""
    return (lam_R * UR - lam_L * UL - (FR - FL)) / (lam_R - lam_L)


def hll_flux(UL, UR, params: FluidParams, qL=None, qR=None) -> np.ndarray:
    """Standard HLL numerical flux."""
    UL = np.asarray(UL, float)
    UR = np.asarray(UR, float)
    qL = cons_to_prim(UL, params) if qL is None else qL
    qR = cons_to_prim(UR, params) if qR is None else qR
    ws = wave_speeds(qL[1], qR[1], params)
    lL, lR = ws.lam_L, ws.lam_R
    FL = physical_flux(qL, params)
    FR = physical_flux(qR, params)
    return (lR * FL - lL * FR) / (lR - lL) + lR * lL * (UR - UL) / (lR - lL)


def _positivity(u0m, u0_minus, u0_plus, lam_L, lam_R, theta):
    """Raise U0 of the intermediate states to the floor ``theta`` keeping the mass balance.

    The plus state is corrected first; when one of the wave speeds vanishes the
    ratio is undefined and the offending state is clamped.  If both sides fall
    below ``theta``, or the HLL average itself does (no balanced correction can
    then keep both sides above the floor), both are clamped and reported.
    """
    plus_low = u0_plus <= theta
    minus_low = u0_minus <= theta
    both = (plus_low & minus_low) | ((plus_low | minus_low) & (u0m <= theta))
    lL_safe = np.where(lam_L != 0, lam_L, -1.0)
    lR_safe = np.where(lam_R != 0, lam_R, 1.0)

    fix_minus = plus_low & ~both
    new_minus = np.where(
        lam_L != 0,
        (1.0 - lam_R / lL_safe) * u0m + (lam_R / lL_safe) * theta,
        np.maximum(u0_minus, theta),
    )
    fix_plus = minus_low & ~plus_low
    new_plus = np.where(
        lam_R != 0,
        (1.0 - lam_L / lR_safe) * u0m + (lam_L / lR_safe) * theta,
        np.maximum(u0_plus, theta),
    )
    out_minus = np.where(fix_minus, new_minus, u0_minus)
    out_plus = np.where(fix_minus, theta, u0_plus)
    out_plus = np.where(fix_plus, new_plus, out_plus)
    out_minus = np.where(fix_plus, theta, out_minus)
    out_minus = np.where(both, theta, out_minus)
    out_plus = np.where(both, theta, out_plus)
    return out_minus, out_plus, both


def wb_intermediate_states(
    UL,
    UR,
    s_hat1,
    dx: float,
    params: FluidParams,
    theta: float = THETA_DEFAULT,
    qL=None,
    qR=None,
    sonic_tol: float = SONIC_TOL,
    FL=None,
    FR=None,
) -> IntermediateStates:
    """Intermediate states of the well-balanced four-state solver.

    The momentum-type components share one value shifted by the discrete
    source; the U0 component jumps across x = 0 so that pairs joined by a
    discrete steady state are reproduced exactly.  Transverse components (2D)
    take the plain HLL average.
    """
    UL = np.asarray(UL, float)
    UR = np.asarray(UR, float)
    qL = cons_to_prim(UL, params) if qL is None else qL
    qR = cons_to_prim(UR, params) if qR is None else qR
    ws = wave_speeds(qL[1], qR[1], params)
    lL, lR = ws.lam_L, ws.lam_R
    FL = physical_flux(qL, params) if FL is None else FL
    FR = physical_flux(qR, params) if FR is None else FR
    UM = hll_average(UL, UR, FL, FR, lL, lR)
    s_dx = np.asarray(s_hat1, float) * dx
    width = lR - lL

    minus = UM.copy()
    plus = UM.copy()
    minus[1] = UM[1] + s_dx / width
    plus[1] = minus[1]

    eps, k = params.eps, params.k
    uLuR = qL[1] * qR[1]
    lam = (k * k - uLuR) / (1.0 - eps**4 * k * k * uLuR)
    sonic = np.abs(lam) < sonic_tol
    jump = np.where(sonic, (1.0 - eps**4 * k**4) * (qR[0] - qL[0]), s_dx / np.where(sonic, 1.0, lam))
    plus[0] = UM[0] - lL / width * jump
    minus[0] = UM[0] - lR / width * jump

    minus[0], plus[0], both = _positivity(UM[0], minus[0], plus[0], lL, lR, theta)
    return IntermediateStates(minus, plus, np.broadcast_to(np.asarray(s_hat1, float), lL.shape), lL, lR, both)


def source_intermediate_states(UL, UR, s_hat1, dx: float, params: FluidParams, qL=None, qR=None,
                               FL=None, FR=None) -> IntermediateStates:
    """Single intermediate state U_M + S dx / (lamR - lamL) used with a non-balanced source."""
    UL = np.asarray(UL, float)
    UR = np.asarray(UR, float)
    qL = cons_to_prim(UL, params) if qL is None else qL
    qR = cons_to_prim(UR, params) if qR is None else qR
    ws = wave_speeds(qL[1], qR[1], params)
    lL, lR = ws.lam_L, ws.lam_R
    FL = physical_flux(qL, params) if FL is None else FL
    FR = physical_flux(qR, params) if FR is None else FR
    UM = hll_average(UL, UR, FL, FR, lL, lR)
    UM[1] = UM[1] + np.asarray(s_hat1, float) * dx / (lR - lL)
    return IntermediateStates(UM, UM.copy(), np.broadcast_to(np.asarray(s_hat1, float), lL.shape), lL, lR)


def wb_flux(UL, UR, inter: IntermediateStates, params: FluidParams, FL=None, FR=None) -> np.ndarray:
    """Interface flux 1/2 (F(UL) + F(UR) + lamL (UM- - UL) + lamR (UM+ - UR))."""
    UL = np.asarray(UL, float)
    UR = np.asarray(UR, float)
    if FL is None:
        FL = physical_flux(cons_to_prim(UL, params), params)
    if FR is None:
        FR = physical_flux(cons_to_prim(UR, params), params)
    return 0.5 * (FL + FR + inter.lam_L * (inter.um_minus - UL) + inter.lam_R * (inter.um_plus - UR))


def consistency_defect(UL, UR, inter: IntermediateStates, dx: float, params: FluidParams) -> np.ndarray:
    """Residual of lamR UM+ - lamL UM- = lamR UR - lamL UL - (FR - FL) + dx (0, S1[, 0])."""
    UL = np.asarray(UL, float)
    UR = np.asarray(UR, float)
    FL = physical_flux(cons_to_prim(UL, params), params)
    FR = physical_flux(cons_to_prim(UR, params), params)
    lL, lR = inter.lam_L, inter.lam_R
    rhs = lR * UR - lL * UL - (FR - FL)
    rhs[1] = rhs[1] + inter.s_hat1 * dx
    return lR * inter.um_plus - lL * inter.um_minus - rhs
