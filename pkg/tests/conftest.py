import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


def random_states(rng, n, params, dim=1, rho_range=(0.05, 5.0), speed_frac=0.95):
    """Random admissible primitive states (rho, u[, v]) as a component-first array."""
    rho = rng.uniform(*rho_range, n)
    vmax = speed_frac * params.light_speed if params.eps > 0 else 5.0
    if dim == 1:
        return np.array([rho, rng.uniform(-vmax, vmax, n)])
    speed = vmax * np.sqrt(rng.uniform(0, 1, n))
    ang = rng.uniform(0, 2 * np.pi, n)
    return np.array([rho, speed * np.cos(ang), speed * np.sin(ang)])


# -- acceptance summary ---------------------------------------------------------
# Each acceptance check registers (criterion, label, passed, detail); the terminal
# summary folds them into one PASS/FAIL line per criterion.

ACCEPTANCE: dict = {}


def record_criterion(number: int, label: str, passed: bool, detail: str) -> bool:
    line = f"[criterion {number:2d}] {'PASS' if passed else 'FAIL'} {label}: {detail}"
    print(line)
    ACCEPTANCE.setdefault(number, []).append((label, bool(passed), detail))
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[number]
        ok = all(p for _, p, _ in checks)
        parts = "; ".join(f"{label} {'ok' if p else 'FAILED'} ({detail})" for label, p, detail in checks)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} | {parts}")
