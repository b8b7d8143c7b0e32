import os
import sys

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from sigcontain.graph import SignedGraph  # noqa: E402


def random_signed_graph(rng, n, p=0.2, neg=0.4, n_leaders=0):
    """Erdos-Renyi style signed digraph with positive self-loops."""
    leaders = list(range(n_leaders))
    edges = [(i, i, 1) for i in range(n)]
    for s in range(n):
        for d in range(n_leaders, n):
            if s != d and rng.random() < p:
                edges.append((s, d, -1 if rng.random() < neg else 1))
    return SignedGraph(n, tuple(edges), tuple(leaders))


@st.composite
def signed_graphs(draw, max_n=10, leaders=True):
    n = draw(st.integers(1, max_n))
    n_leaders = draw(st.integers(0, min(2, n - 1))) if leaders else 0
    pairs = [(s, d) for s in range(n) for d in range(n_leaders, n) if s != d]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=3 * n)) if pairs else []
    signs = draw(st.lists(st.sampled_from([1, -1]), min_size=len(chosen), max_size=len(chosen)))
    edges = [(i, i, 1) for i in range(n)] + [(s, d, w) for (s, d), w in zip(chosen, signs)]
    return SignedGraph(n, tuple(edges), tuple(range(n_leaders)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
