from pathlib import Path

import numpy as np
import pytest

from caacs import GtspInstance, carbon_for_instance
from caacs.io import GeneratorSpec, generate_random

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


def small_instance(n=9, m=3, seed=0):
    return generate_random(GeneratorSpec(n, m, seed=seed))


@pytest.fixture
def tiny():
    # 6 nodes in 3 clusters with an obvious optimum 0-2-4
    cost = np.full((6, 6), 100.0)
    np.fill_diagonal(cost, 0.0)
    for i, j in ((0, 2), (2, 4), (4, 0)):
        cost[i, j] = cost[j, i] = 1.0
    return GtspInstance("tiny", cost, [0, 0, 1, 1, 2, 2])


@pytest.fixture
def inst_with_carbon():
    inst = small_instance(12, 4, seed=5)
    return inst, carbon_for_instance(inst, seed=1)


# one PASS/FAIL line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = {}


@pytest.fixture
def verdict():
    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
