"""Small graph families and random instances used by the checks and tests."""

import numpy as np

from .graph import Graph


def path_graph(n, infinity=None, prefix="v"):
    """Path v1 - v2 - ... - vn with edges oriented along the path."""
    vs = [f"{prefix}{k}" for k in range(1, n + 1)]
    edges = list(zip(vs[:-1], vs[1:]))
    return Graph(vs, edges, infinity if infinity is not None else vs[-1])


def star_graph(leaves, center="c", infinity=None):
    vs = [center] + [f"l{k}" for k in range(1, leaves + 1)]
    edges = [(center, leaf) for leaf in vs[1:]]
    return Graph(vs, edges, infinity if infinity is not None else vs[-1])


def triangle():
    return Graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")], "c")


def random_connected_graph(n, rng, extra_edge_prob=None):
    """Random spanning tree plus independent extra edges, random orientations.

    The infinity vertex is chosen uniformly.
    """
    if n < 1:
        raise ValueError("need at least one vertex")
    if extra_edge_prob is None:
        extra_edge_prob = min(1.0, 3.0 / max(n, 1))
    vs = [f"v{k}" for k in range(n)]
    pairs = set()
    for k in range(1, n):
        j = int(rng.integers(0, k))
        pairs.add((j, k))
    if n > 2 and extra_edge_prob > 0:
        iu, ju = np.triu_indices(n, 1)
        pick = rng.random(len(iu)) < extra_edge_prob
        pairs.update(zip(iu[pick].tolist(), ju[pick].tolist()))
    pairs = sorted(pairs)
    flip = rng.random(len(pairs)) < 0.5
    edges = [(vs[b], vs[a]) if f else (vs[a], vs[b]) for (a, b), f in zip(pairs, flip)]
    order = rng.permutation(len(edges))
    edges = [edges[i] for i in order]
    return Graph(vs, edges, vs[int(rng.integers(0, n))])


def random_domain(G, rng, keep=None):
    """Random nonempty subset of the non-infinity vertices."""
    candidates = [v for v in G.vertices if v != G.infinity]
    if keep is None:
        keep = rng.uniform(0.2, 1.0)
    chosen = [v for v in candidates if rng.random() < keep]
    if not chosen:
        chosen = [candidates[int(rng.integers(0, len(candidates)))]]
    return G.domain(chosen)
