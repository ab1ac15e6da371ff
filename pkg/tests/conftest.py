import pytest

from primerset import kernels
from primerset.instances import generate_random_instance

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return request.param


@pytest.fixture
def tiny_instances():
    """Small random instances used by several oracle comparisons."""
    out = []
    for seed in range(40):
        n = 1 + seed % 3
        L = 6 + seed % 7
        out.append(generate_random_instance(n, L, 2, seed))
    return out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
