import numpy as np
import pytest
from hypothesis import settings

from resist_curve.generators import random_connected_graph

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def random_graphs(count, n_lo, n_hi, seed, weights=(0.1, 10.0)):
    """Deterministic batch of random connected weighted graphs."""
    gen = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(gen.integers(n_lo, n_hi + 1))
        extra = int(gen.integers(0, n + 1))
        out.append(random_connected_graph(n, extra, seed=seed * 1000 + k, weights=weights))
    return out


@pytest.fixture
def tmp_out(tmp_path):
    return tmp_path


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
