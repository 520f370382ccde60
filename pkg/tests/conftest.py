import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from netpotential.generators import path_graph, star_graph, triangle
from netpotential.graph import Graph

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).resolve().parents[1] / "src" / "netpotential" / "data"


@pytest.fixture
def p3():
    return path_graph(3)


@pytest.fixture
def tri():
    return triangle()


@pytest.fixture
def star():
    return star_graph(3)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@st.composite
def graphs(draw, min_n=2, max_n=12):
    """Connected simple graph: random tree, extra edges, random orientations."""
    n = draw(st.integers(min_n, max_n))
    vs = [f"v{k}" for k in range(n)]
    pairs = {(draw(st.integers(0, k - 1)), k) for k in range(1, n)}
    all_pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    if all_pairs:
        pairs |= set(draw(st.lists(st.sampled_from(all_pairs), max_size=2 * n)))
    pairs = sorted(pairs)
    flips = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [(vs[b], vs[a]) if f else (vs[a], vs[b]) for (a, b), f in zip(pairs, flips)]
    infinity = vs[draw(st.integers(0, n - 1))]
    return Graph(vs, edges, infinity)


@st.composite
def graphs_with_domain(draw, min_n=2, max_n=12):
    G = draw(graphs(min_n=min_n, max_n=max_n))
    candidates = [v for v in G.vertices if v != G.infinity]
    members = draw(st.lists(st.sampled_from(candidates), min_size=1, unique=True))
    return G, G.domain(members)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
