import numpy as np
import pytest

FIXTURE = [0.1, 0.2, 0.3]

# 2^3 outcome enumeration of FIXTURE, done by hand
FIXTURE_PMF = (0.504, 0.398, 0.092, 0.006)


def random_vectors(seed, count, n_range=(1, 12), p_max=0.95):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        p = rng.uniform(0.0, p_max, size=n)
        if p.sum() == 0:
            continue
        out.append([float(v) for v in p])
    return out


@pytest.fixture
def fixture_params():
    return list(FIXTURE)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
