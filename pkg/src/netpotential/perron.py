"""Harmonicity tests, harmonic lifting, and Perron's method for the Dirichlet problem.

Perron's supremum over subharmonic minorants is realised constructively:
start from the constant ``min g`` and repeatedly replace the value at each
domain vertex by its neighbour average (a harmonic lift). Each lift keeps the
iterate subharmonic and below ``g`` on the boundary while raising it, so the
iterates climb monotonically to the harmonic function with boundary data ``g``.
"""

import enum
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .calculus import laplacian
from .errors import (
    EmptyBoundary,
    MissingClosureValue,
    NotConverged,
    NotSubharmonic,
    VertexNotInDomain,
)
from .graph import as_domain, boundary_mask
from .oracle import DirichletProblem

# sign tests allow this much slack, relative to max(1, |U|_inf)
SIGN_SLACK = 1e-12


class Harmonicity(str, enum.Enum):
    HARMONIC = "harmonic"
    SUBHARMONIC = "subharmonic"
    SUPERHARMONIC = "superharmonic"
    NEITHER = "neither"


@dataclass
class HarmonicityReport:
    per_vertex: dict
    classification: Harmonicity

    @property
    def is_subharmonic(self):
        return self.classification in (Harmonicity.SUBHARMONIC, Harmonicity.HARMONIC)

    @property
    def is_superharmonic(self):
        return self.classification in (Harmonicity.SUPERHARMONIC, Harmonicity.HARMONIC)


def _closure_array(G, U, D):
    """Vertex array of ``U``; only values on D and its boundary are required."""
    closure = D.mask | boundary_mask(G, D)
    if isinstance(U, Mapping):
        arr = np.zeros(G.n)
        for i in np.flatnonzero(closure):
            v = G.vertices[i]
            if v not in U:
                raise MissingClosureValue(f"no value at closure vertex {v!r}")
            arr[i] = U[v]
        return arr
    arr = np.asarray(U, dtype=float)
    if arr.shape != (G.n,):
        raise MissingClosureValue(f"field has shape {arr.shape}, expected ({G.n},)")
    # values off the closure are irrelevant; zero them so they cannot leak in
    return np.where(closure, arr, 0.0)


def _slack(U):
    return SIGN_SLACK * max(1.0, float(np.max(np.abs(U))) if len(U) else 1.0)


def classify_harmonicity(G, U, D):
    """Sign of the normalized Laplacian of ``U`` over the domain."""
    D = as_domain(G, D)
    U = _closure_array(G, U, D)
    defects = laplacian(G, U)[D.indices]
    slack = _slack(U)
    sub = bool(np.all(defects >= -slack))
    sup = bool(np.all(defects <= slack))
    if sub and sup:
        cls = Harmonicity.HARMONIC
    elif sub:
        cls = Harmonicity.SUBHARMONIC
    elif sup:
        cls = Harmonicity.SUPERHARMONIC
    else:
        cls = Harmonicity.NEITHER
    per_vertex = {G.vertices[i]: float(d) for i, d in zip(D.indices, defects)}
    return HarmonicityReport(per_vertex=per_vertex, classification=cls)


def harmonic_lift(G, U, x0, D):
    """Copy of ``U`` with the value at ``x0`` replaced by its neighbour average."""
    D = as_domain(G, D)
    if x0 not in D.members:
        raise VertexNotInDomain(f"{x0!r} is not in the domain")
    U = _closure_array(G, U, D).copy()
    k = G.index[x0]
    nb = G.neighbors[k]
    U[k] = sum(U[w] for w in nb) / len(nb)
    return U


def is_in_perron_family(G, U, D, g):
    """Whether ``U`` is subharmonic on D and at most ``g`` on the boundary."""
    D = as_domain(G, D)
    U = _closure_array(G, U, D)
    bmask = boundary_mask(G, D)
    garr = DirichletProblem(G, D, boundary_values=g).boundary_array()
    below = bool(np.all(U[bmask] <= garr[bmask]))
    return below and classify_harmonicity(G, U, D).is_subharmonic


@dataclass
class PerronState:
    current: np.ndarray
    boundary_values: np.ndarray
    sweep_count: int
    last_delta: float


def perron_iterate(G, D, g):
    """Yield a :class:`PerronState` after every full round-robin pass.

    The iteration never stops on its own; callers decide when to stop.
    """
    D = as_domain(G, D)
    bmask = boundary_mask(G, D)
    if not bmask.any():
        raise EmptyBoundary("domain has no boundary vertices")
    garr = DirichletProblem(G, D, boundary_values=g).boundary_array()
    start = float(garr[bmask].min())
    u = np.where(bmask, garr, 0.0)
    u[D.indices] = start
    vals = u.tolist()
    order = D.indices.tolist()
    nbrs = G.neighbors
    inv_deg = (1.0 / G.degrees).tolist()
    passes = 0
    while True:
        delta = 0.0
        for v in order:
            s = 0.0
            for w in nbrs[v]:
                s += vals[w]
            new = s * inv_deg[v]
            change = abs(new - vals[v])
            if change > delta:
                delta = change
            vals[v] = new
        passes += 1
        yield PerronState(current=np.array(vals), boundary_values=garr,
                          sweep_count=passes, last_delta=delta)


def perron_solve(G, D, g, tol=1e-12, max_passes=10**6, log=None):
    """Harmonic function on ``D`` with boundary values ``g``.

    The iteration contracts geometrically, so the distance to the limit is
    about ``delta * q / (1 - q)`` where ``delta`` is the largest change in the
    last pass and ``q`` the ratio of successive changes. Iteration stops once
    both ``delta`` and that estimate fall below ``tol``, or once ``delta`` is
    down to rounding level.

    :param tol: target accuracy in the max norm
    :param max_passes: raise :class:`NotConverged` beyond this many passes
    :param log: optional list receiving ``(pass_index, last_delta)`` tuples
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    prev = None
    floor = None
    for state in perron_iterate(G, D, g):
        if floor is None:
            floor = 8 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(state.current))))
        delta = state.last_delta
        if log is not None:
            log.append((state.sweep_count, delta))
        if delta <= floor:
            return state.current
        if delta < tol and prev:
            q = delta / prev
            if q < 1 and delta * q / (1 - q) < tol:
                return state.current
        if state.sweep_count >= max_passes:
            raise NotConverged(
                f"Perron iteration not converged after {max_passes} passes "
                f"(last change {delta:.3e})",
                residual=delta, iterations=state.sweep_count)
        prev = delta


def extremum_trace(G, U, D):
    """Maximum of a subharmonic ``U`` over the closure and a boundary vertex attaining it.

    The vertex is ``None`` if no boundary vertex attains the maximum exactly.
    """
    D = as_domain(G, D)
    U = _closure_array(G, U, D)
    if not classify_harmonicity(G, U, D).is_subharmonic:
        raise NotSubharmonic("field is not subharmonic on the domain")
    bmask = boundary_mask(G, D)
    closure = D.mask | bmask
    top = float(U[closure].max())
    hits = np.flatnonzero(bmask & (U == top))
    vertex = G.vertices[hits[0]] if len(hits) else None
    return top, vertex
