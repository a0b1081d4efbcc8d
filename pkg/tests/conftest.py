import random
from pathlib import Path

import pytest

from vybe import DiagonalTensor, affine_sl2, heisenberg

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

ACCEPTANCE_LINES = []


def random_skew_tensor(U, levels, rng, lo=-2, hi=2, density=1.0):
    """Random skewsymmetric diagonal tensor supported on ``levels``."""
    mats = {}
    for t in levels:
        k = U.dim(t)
        M = [[0] * k for _ in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                if rng.random() <= density:
                    x = rng.randint(lo, hi)
                    M[i][j], M[j][i] = x, -x
        mats[t] = M
    return DiagonalTensor.from_matrices(U, mats)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def heis4():
    return heisenberg(N=4)


@pytest.fixture(scope="session")
def heis3():
    return heisenberg(N=3)


@pytest.fixture(scope="session")
def sl2_2():
    return affine_sl2(k=1, N=2)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
