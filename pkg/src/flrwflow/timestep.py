"""CFL time-step control and explicit integrators for dU/dt = L(U, t)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import FluidParams, GridState, cons_to_prim
from .riemann import wave_speeds

Rhs = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class StepControl:
    cfl: float = 0.3
    t_end: float = 1.0
    contracting_guard: float = 0.5
    dt_floor: float = 0.0
    dt_cap: float = np.inf
    allow_cfl_above_half: bool = False

    def __post_init__(self):
        if not self.cfl > 0:
            raise ValueError(f"cfl must be positive, got {self.cfl}")
        if self.cfl >= 0.5 and not self.allow_cfl_above_half:
            raise ValueError(
                f"cfl={self.cfl} violates the strict bound cfl < 1/2; "
                "set allow_cfl_above_half to override"
            )
        if self.cfl >= 1.0:
            raise ValueError(f"cfl={self.cfl} must stay below 1")
        if not 0 < self.contracting_guard < 1:
            raise ValueError("contracting_guard must lie in (0, 1)")


def max_wave_speed(q: np.ndarray, params: FluidParams) -> float:
    """Largest |lambda_L|, |lambda_R| over all interfaces in every direction."""
    best = 0.0
    d = q.shape[0] - 1
    for axis in range(d):
        un = q[1 + axis]
        ws = wave_speeds(un, np.roll(un, -1, axis=axis), params)
        best = max(best, float(np.max(-ws.lam_L)), float(np.max(ws.lam_R)))
    return best


def compute_dt(grid: GridState, ctrl: StepControl, params: FluidParams, source_active: bool = True) -> float:
    q = cons_to_prim(grid.U, params)
    smax = max_wave_speed(q, params)
    h = min(grid.dx, grid.dy)
    if smax > 0:
        dt = ctrl.cfl * h / smax
    elif source_active:
        dt = ctrl.dt_cap if np.isfinite(ctrl.dt_cap) else ctrl.t_end - grid.t
    else:
        raise ValueError("static vacuum: no wave speed and no active source to set a time step")
    dt = min(dt, ctrl.dt_cap)
    if grid.t < 0:
        dt = min(dt, ctrl.contracting_guard * abs(grid.t))
    dt = max(dt, ctrl.dt_floor)
    return min(dt, ctrl.t_end - grid.t)


def step_forward_euler(U: np.ndarray, t: float, dt: float, rhs: Rhs) -> np.ndarray:
    return U + dt * rhs(U, t)


def step_rk4(U: np.ndarray, t: float, dt: float, rhs: Rhs) -> np.ndarray:
    k1 = rhs(U, t)
    k2 = rhs(U + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = rhs(U + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = rhs(U + dt * k3, t + dt)
    return U + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_ssprk3(U: np.ndarray, t: float, dt: float, rhs: Rhs) -> np.ndarray:
    """Shu-Osher three-stage SSP Runge-Kutta."""
    U1 = U + dt * rhs(U, t)
    U2 = 0.75 * U + 0.25 * (U1 + dt * rhs(U1, t + dt))
    return U / 3.0 + 2.0 / 3.0 * (U2 + dt * rhs(U2, t + 0.5 * dt))


INTEGRATORS = {
    "euler": step_forward_euler,
    "rk4": step_rk4,
    "ssprk3": step_ssprk3,
}


def integrate(U0: np.ndarray, t0: float, t1: float, dt: float, rhs: Rhs, method: str = "rk4") -> np.ndarray:
    """Fixed-step integration from t0 to t1 (the last step is shortened to land on t1)."""
    step = INTEGRATORS[method]
    U, t = np.asarray(U0, float), t0
    n = int(np.ceil((t1 - t0) / dt - 1e-12))
    for i in range(n):
        h = min(dt, t1 - t)
        U = step(U, t, h, rhs)
        t = t0 + (i + 1) * dt if i + 1 < n else t1
    return U
