import numpy as np
import pytest

# Acceptance results collected by tests/test_acceptance.py, printed at the end.
ACCEPTANCE: dict = {}


def rel_error(J, K) -> float:
    """Max entrywise relative error over all Jacobi parameters.

    Entries that are exactly zero contribute their absolute error.
    """
    x = np.concatenate([J.a, J.b])
    y = np.concatenate([K.a, K.b])
    err = np.abs(x - y)
    mag = np.abs(x)
    return float(np.max(np.where(mag > 0, err / np.where(mag > 0, mag, 1.0), err)))


@pytest.fixture
def golden():
    from complexjacobi import validate

    return validate([1.0], [1j, 0.0])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[2:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")


def density_mass(model):
    """Total mass of a closed-form density, integrated directly in ``s``.

    ``s = lo + (hi - lo)(1 - cos th)/2`` on each support piece absorbs both
    inverse-square-root and square-root end behaviour.
    """
    import math

    from scipy import integrate

    total = 0.0
    for lo, hi in model.support:
        half = (hi - lo) / 2

        def f(th):
            s = lo + half * (1 - math.cos(th))
            return float(model.density(s)) * half * math.sin(th)

        val, _ = integrate.quad(f, 0.0, math.pi, epsabs=1e-13, epsrel=1e-12, limit=400)
        total += val
    return total
