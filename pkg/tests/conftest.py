import numpy as np
import pytest

from greedyprune import _backend


@pytest.fixture(params=_backend.available())
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def gram_tokens(gram):
    """Token rows whose pairwise cosines are exactly the given unit-diagonal Gram matrix (up to rounding)."""
    return np.linalg.cholesky(np.asarray(gram, dtype=float))


def random_instance(rng, n, d=None, *, unit=True):
    d = d or int(rng.integers(2, 12))
    x = rng.standard_normal((n, d))
    if unit:
        x /= np.linalg.norm(x, axis=1, keepdims=True)
    w = rng.random(n)
    return x, w


# lines recorded by test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
