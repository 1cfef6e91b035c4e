import numpy as np
import pytest

from dsmooth import MatrixOperator, l1box_problem, random_instance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def tiny_instances(count=20, max_dim=5, seed=0, box_hi=0.1):
    """Random l1/box problems with arbitrary (not necessarily box-preserving) operators."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n, m = rng.integers(1, max_dim + 1, size=2)
        A = rng.normal(size=(m, n))
        b = rng.uniform(0, box_hi, m)
        lam = rng.uniform(0, 0.5)
        out.append(l1box_problem(MatrixOperator(A), b, lam, box_hi))
    return out


@pytest.fixture(scope="session")
def desk_instance():
    problem, _ = random_instance(16, 16, seed=7, lam=0.05, box_hi=1.0)
    return problem


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line; returns the pass flag so the test can assert on it."""
    def record(label, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  {label}: {detail}"
        _CRITERIA.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
