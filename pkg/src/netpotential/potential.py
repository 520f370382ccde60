"""Fundamental solutions pinned at the infinity vertex and Newtonian potentials."""

import threading
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .calculus import NORMALIZED, UNNORMALIZED, as_variant
from .errors import MassAtInfinity, NegativeMass, PoleAtInfinity, SameVertex, UnknownVertex
from .oracle import DirichletProblem, _solve, dirichlet_solve, system_matrix

_memo_lock = threading.Lock()


@dataclass(frozen=True)
class FundamentalSolution:
    pole: str
    values: np.ndarray
    variant: str


def _punctured(G):
    return [v for v in G.vertices if v != G.infinity]


def fundamental_solution(G, x, variant=NORMALIZED):
    """Solve -L Phi = 1_x off infinity with Phi(infinity) = 0.

    Results are memoized on the graph per ``(pole, variant)``.
    """
    variant = as_variant(variant)
    if x not in G.index:
        raise UnknownVertex(f"pole {x!r} is not a vertex")
    if x == G.infinity:
        raise PoleAtInfinity(f"pole {x!r} is the infinity vertex")
    key = ("phi", x, variant)
    cached = G._cache.get(key)
    if cached is not None:
        return cached
    green = G._cache.get(("green", variant))
    if green is not None:
        values = green[G.index[x]].copy()
    else:
        p = DirichletProblem(G, _punctured(G), rhs={x: 1.0}, variant=variant)
        values = dirichlet_solve(p)
    values.setflags(write=False)
    phi = FundamentalSolution(pole=x, values=values, variant=variant)
    with _memo_lock:
        return G._cache.setdefault(key, phi)


def green_matrix(G, variant=NORMALIZED):
    """Matrix whose row ``G.index[x]`` is Phi_x; the infinity row is zero.

    One factorisation serves every pole; the result is memoized.
    """
    variant = as_variant(variant)
    key = ("green", variant)
    cached = G._cache.get(key)
    if cached is not None:
        return cached
    D = G.domain(_punctured(G))
    A = system_matrix(G, D, variant)
    X = _solve(A, np.eye(len(D.indices)))
    M = np.zeros((G.n, G.n))
    # column j of X is the potential of the unit mass at D.indices[j]
    M[np.ix_(D.indices, D.indices)] = X.T
    M.setflags(write=False)
    with _memo_lock:
        return G._cache.setdefault(key, M)


def newtonian_potential(G, mu, variant=NORMALIZED):
    """Superposition sum_x mu(x) Phi_x of fundamental solutions."""
    variant = as_variant(variant)
    if isinstance(mu, Mapping):
        unknown = [v for v in mu if v not in G.index]
        if unknown:
            raise UnknownVertex(f"measure given at unknown vertices {unknown}")
        mu = {v: float(m) for v, m in mu.items()}
        mu = np.array([mu.get(v, 0.0) for v in G.vertices])
    else:
        mu = G.vertex_array(mu, "mu").astype(float)
    if np.any(mu < 0):
        raise NegativeMass("measure has negative values")
    if mu[G.infinity_index] != 0:
        raise MassAtInfinity(f"measure charges the infinity vertex {G.infinity!r}")
    out = np.zeros(G.n)
    for k in np.flatnonzero(mu):
        out += mu[k] * fundamental_solution(G, G.vertices[k], variant).values
    return out


def symmetry_check(G, x, v, variant=NORMALIZED):
    """Both sides of the reciprocity identity for the fundamental solutions.

    Unnormalized: ``(Phi_x(v), Phi_v(x))``. Normalized: the degree-weighted
    pair ``(deg(v) Phi_x(v), deg(x) Phi_v(x))``; the plain values agree only on
    regular graphs.
    """
    variant = as_variant(variant)
    if x == v:
        raise SameVertex(f"symmetry needs two distinct vertices, got {x!r} twice")
    for y in (x, v):
        if y == G.infinity:
            raise PoleAtInfinity(f"{y!r} is the infinity vertex")
    phi_x = fundamental_solution(G, x, variant).values
    phi_v = fundamental_solution(G, v, variant).values
    lhs = float(phi_x[G.index[v]])
    rhs = float(phi_v[G.index[x]])
    if variant is UNNORMALIZED:
        return lhs, rhs
    return G.degree(v) * lhs, G.degree(x) * rhs
