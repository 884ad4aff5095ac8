import mpmath
import pytest

mpmath.mp.dps = 60


def mp_annual(mu, sigma, n):
    """Direct extended-precision E(X_n), Var(X_n) (no log-space tricks)."""
    g = 1 + mpmath.mpf(mu)
    s2 = mpmath.mpf(sigma) ** 2
    return g**n, (g**2 + s2) ** n - g ** (2 * n)


def mp_compounded_sharpe(mu, sigma, n):
    mean, var = mp_annual(mu, sigma, n)
    return (mean - 1) / mpmath.sqrt(var)


def mp_log10_abs(x):
    return float(mpmath.log10(abs(x)))


@pytest.fixture
def fixtures_dir(request):
    return request.path.parent / "fixtures"


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
