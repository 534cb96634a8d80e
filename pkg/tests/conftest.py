import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def random_instance(rng: np.random.Generator):
    """One weighted sample: n in 2..50, flat Dirichlet weights, data drawn
    from a mix of continuous, heavy-tailed and tied distributions."""
    n = int(rng.integers(2, 51))
    kind = rng.integers(6)
    if kind == 0:
        x = rng.normal(rng.normal(0, 5), rng.uniform(0.1, 10), n)
    elif kind == 1:
        x = rng.exponential(rng.uniform(0.2, 5), n)
    elif kind == 2:
        x = rng.poisson(rng.uniform(0.3, 6), n).astype(float)
    elif kind == 3:
        x = rng.standard_t(2, n)
    elif kind == 4:
        x = rng.lognormal(0, 1.5, n)
    else:
        x = np.round(rng.uniform(-3, 3, n), 1)
    w = rng.exponential(size=n)
    return x, w / w.sum()


def random_instances(count: int, seed: int):
    rng = np.random.default_rng(seed)
    return [random_instance(rng) for _ in range(count)]


@pytest.fixture
def acceptance_report():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
