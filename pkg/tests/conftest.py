import mpmath as mp
import pytest

mp.mp.dps = 40

from carleson_ns.counterexample import CounterexampleParams
from carleson_ns.meyer import build_profile


@pytest.fixture(scope="session")
def profile():
    return build_profile()


@pytest.fixture(scope="session")
def default_params():
    return CounterexampleParams(2, 0.25, 0.75)


# High-precision reference profile, written from the closed-form transition
# polynomials rather than from the package code.
_NU = {
    1: lambda x: x**2 * (3 - 2 * x),
    3: lambda x: x**4 * (35 - 84 * x + 70 * x**2 - 20 * x**3),
}


def mp_psi0(xi, order=3):
    a = abs(mp.mpf(xi))
    if a <= 2 * mp.pi / 3:
        return mp.mpf(1)
    if a >= 4 * mp.pi / 3:
        return mp.mpf(0)
    return mp.cos(mp.pi / 2 * _NU[order](3 * a / (2 * mp.pi) - 1))


def mp_omega(xi, order=3):
    return mp.sqrt(max(mp_psi0(mp.mpf(xi) / 2, order) ** 2 - mp_psi0(xi, order) ** 2, 0))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
