import warnings

import pytest

from polaron_wqed.model import Dispersion, ModelParams
from polaron_wqed.polaron import solve_self_consistent

ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def solve():
    """Cached polaron solutions keyed by constructor arguments."""
    cache = {}

    def _solve(**kwargs):
        key = tuple(sorted(kwargs.items()))
        if key not in cache:
            params = ModelParams(**kwargs)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cache[key] = (params, solve_self_consistent(params))
        return cache[key]

    return _solve


@pytest.fixture(scope="session")
def cosine6():
    return dict(omega_c=6.0, dispersion=Dispersion.COSINE_HARD, num_modes=512)
