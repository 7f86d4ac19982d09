import numpy as np
import pytest
from hypothesis import settings

from nilharm.nilgroup import make_free_two_step, make_heisenberg

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

GROUPS = {
    "heisenberg-1": make_heisenberg(1),
    "heisenberg-2": make_heisenberg(2),
    "free2step-3": make_free_two_step(3),
    "free2step-4": make_free_two_step(4),
}
MW_GROUPS = ["heisenberg-1", "heisenberg-2", "free2step-4"]


@pytest.fixture(params=list(GROUPS))
def any_group(request):
    return GROUPS[request.param]


@pytest.fixture(params=MW_GROUPS)
def mw_group(request):
    return GROUPS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    """Remember one acceptance line; printed in the terminal summary."""
    ACCEPTANCE_LINES.append(f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
