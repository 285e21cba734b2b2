import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from sfgrass.graph import build_graph


@pytest.fixture
def k3():
    return build_graph([(0, 1, 1), (1, 2, 1), (0, 2, 1)], 3)


@pytest.fixture
def p3():
    return build_graph([(0, 1, 1), (1, 2, 1)], 3)


@pytest.fixture
def c4():
    return build_graph([(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)], 4)


@st.composite
def graphs(draw, min_nodes=2, max_nodes=30, connected=False):
    """Random weighted graphs; ``connected`` adds a random spanning tree."""
    n = draw(st.integers(min_nodes, max_nodes))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    m = draw(st.integers(0, 3 * n))
    u = list(rng.integers(0, n, m))
    v = list(rng.integers(0, n, m))
    if connected:
        perm = rng.permutation(n)
        for i in range(1, n):
            u.append(perm[i])
            v.append(perm[rng.integers(0, i)])
    w = rng.uniform(0.1, 5.0, len(u))
    return build_graph(list(zip(u, v, w)), n)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
