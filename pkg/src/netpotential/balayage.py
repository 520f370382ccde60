"""Balayage: solve -L u = mu0 on D, u = 0 on the boundary, by sweeping mass.

Each step picks a domain vertex ``x``, pays its current mass ``m`` into the
potential ``u`` and spreads it to the neighbours so that ``-L u = mu0 - mu``
keeps holding exactly on ``D``. Two internally consistent schemes exist:

``normalized``
    ``u(x) += m``; neighbour ``w`` gains ``m / deg(w)``. Conserves the
    degree-weighted mass ``sum mu(v) deg(v)``.
``unnormalized``
    ``u(x) += m / deg(x)``; each neighbour gains ``m / deg(x)``. Conserves the
    plain mass ``sum mu(v)``.

Mass landing on a boundary vertex is parked in ``boundary_accumulated`` and
never swept again. Parking uses compensated (Neumaier) summation: the
rounding lost on each addition is kept in ``boundary_compensation``, and
``parked()`` returns the corrected totals. Without it the long running sums
on the boundary drift by a few 1e-12 over long runs.
"""

import csv
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .calculus import NORMALIZED, as_variant
from .errors import (
    NegativeMass,
    NotConverged,
    SupportOutsideDomain,
    UnknownVertex,
    VertexNotInDomain,
)
from ._kernel import csr_neighbors, sweep_block
from .graph import as_domain, boundary_mask


class SchedulePolicy(str, enum.Enum):
    ROUND_ROBIN = "round_robin"
    GREEDY_MAX_MASS = "greedy_max_mass"
    RANDOM = "random"


@dataclass(frozen=True)
class Schedule:
    """Order in which domain vertices are swept.

    ``round_robin`` cycles through D in vertex input order; ``greedy_max_mass``
    always picks the vertex holding the most mass (ties by input order);
    ``random`` sweeps D in a fresh random permutation on every pass, so every
    vertex recurs within each block of ``|D|`` steps.
    """

    policy: SchedulePolicy = SchedulePolicy.ROUND_ROBIN
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "policy", SchedulePolicy(self.policy))

    def blocks(self, domain):
        """Infinite iterator of index arrays; ``None`` blocks mean "pick greedily"."""
        idx = domain.indices
        if self.policy is SchedulePolicy.ROUND_ROBIN:
            while True:
                yield idx
        elif self.policy is SchedulePolicy.GREEDY_MAX_MASS:
            while True:
                yield None
        else:
            rng = np.random.default_rng(self.seed)
            while True:
                yield rng.permutation(idx)

    def vertices(self, state):
        """Infinite iterator of vertex indices; greedy reads ``state.mu`` live."""
        idx = state.domain.indices
        for block in self.blocks(state.domain):
            if block is None:
                yield int(idx[np.argmax(state.mu[idx])])
            else:
                yield from block.tolist()


class TraceRecord(NamedTuple):
    step: int
    swept_vertex: str
    mass_before: float
    interior_mass_after: float
    boundary_mass_after: float
    max_residual: float


TRACE_FIELDS = TraceRecord._fields


class Trace:
    """Append-only per-step log stored column-wise."""

    def __init__(self, vertices, capacity=1024):
        self._vertices = vertices
        self._n = 0
        self._cols = {
            "step": np.zeros(capacity, dtype=np.int64),
            "vertex": np.zeros(capacity, dtype=np.int64),
            "mass_before": np.zeros(capacity),
            "interior_mass_after": np.zeros(capacity),
            "boundary_mass_after": np.zeros(capacity),
            "max_residual": np.zeros(capacity),
            # not part of the CSV; lets callers confirm the swept vertex was emptied
            "swept_mass_after": np.zeros(capacity),
        }

    def reserve(self, extra):
        need = self._n + extra
        cap = len(self._cols["step"])
        if need > cap:
            cap = max(need, 2 * cap)
            for name, col in self._cols.items():
                grown = np.zeros(cap, dtype=col.dtype)
                grown[:self._n] = col[:self._n]
                self._cols[name] = grown

    def append(self, step, vertex, mass, interior, boundary, residual, swept_after):
        self.reserve(1)
        j = self._n
        values = (step, vertex, mass, interior, boundary, residual, swept_after)
        for name, x in zip(self._cols, values):
            self._cols[name][j] = x
        self._n += 1

    def column(self, name):
        """Read-only view of one column (``"vertex"`` holds vertex indices)."""
        view = self._cols[name][:self._n]
        view.flags.writeable = False
        return view

    def __len__(self):
        return self._n

    def __getitem__(self, j):
        if j < 0:
            j += self._n
        if not 0 <= j < self._n:
            raise IndexError(j)
        c = self._cols
        return TraceRecord(int(c["step"][j]), self._vertices[c["vertex"][j]],
                           float(c["mass_before"][j]), float(c["interior_mass_after"][j]),
                           float(c["boundary_mass_after"][j]), float(c["max_residual"][j]))

    def __iter__(self):
        return (self[j] for j in range(self._n))


@dataclass
class SweepState:
    """Mutable state of one balayage run; owned by a single caller.

    Masses in ``interior_mass``/``boundary_mass`` are measured in the
    variant's conserved weighting (degree-weighted for normalized).
    ``mu``, ``u`` and ``boundary_accumulated`` are updated in place.
    """

    graph: object
    domain: object
    variant: str
    schedule: Schedule
    mu0: np.ndarray
    mu: np.ndarray
    u: np.ndarray
    boundary_accumulated: np.ndarray
    step: int = 0
    trace: Trace = None
    record_trace: bool = True
    boundary_compensation: np.ndarray = None

    def __post_init__(self):
        G = self.graph
        if self.trace is None:
            self.trace = Trace(G.vertices)
        if self.boundary_compensation is None:
            self.boundary_compensation = np.zeros(G.n)
        self.weights = (G.degrees.astype(float) if self.variant is NORMALIZED
                        else np.ones(G.n))
        self.boundary = boundary_mask(G, self.domain)
        # divide rather than multiply by 1/deg: the rounded reciprocal biases the
        # mass ledger in one direction
        self._deg = G.degrees.astype(float)
        self._residual = np.zeros(G.n)
        self._wd = np.where(self.domain.mask, self.weights, 0.0)
        self._wb = np.where(self.boundary, self.weights, 0.0)
        self.initial_mass = math.fsum((self.mu0 * self.weights).tolist())
        self.last_interior = self.interior_mass

    @property
    def interior_mass(self):
        return math.fsum((self.mu * self._wd).tolist())

    @property
    def boundary_mass(self):
        return math.fsum((self.parked() * self._wb).tolist())

    def parked(self):
        """Mass parked per vertex, with the summation compensation folded in."""
        return self.boundary_accumulated + self.boundary_compensation

    @property
    def residual(self):
        """Current -L u - (mu0 - mu) on the domain (zero elsewhere)."""
        return self._residual.copy()

    @property
    def max_residual(self):
        return float(np.max(np.abs(self._residual)))

    def _local_residual(self, v):
        u = self.u
        uv = u[v]
        s = 0.0
        for w in self.graph.neighbors[v]:
            s += u[w] - uv
        if self.variant is NORMALIZED:
            s /= self._deg[v]
        return -s - (self.mu0[v] - self.mu[v])


def init_sweep(G, D, mu0, variant=NORMALIZED, schedule=None, record_trace=True):
    """Fresh :class:`SweepState` with ``mu = mu0`` and ``u = 0``."""
    D = as_domain(G, D)
    variant = as_variant(variant)
    if isinstance(mu0, dict):
        unknown = [v for v in mu0 if v not in G.index]
        if unknown:
            raise UnknownVertex(f"measure given at unknown vertices {unknown}")
        arr = np.zeros(G.n)
        for v, m in mu0.items():
            arr[G.index[v]] = float(m)
    else:
        arr = G.vertex_array(mu0, "mu0").astype(float)
    if not np.all(np.isfinite(arr)):
        raise NegativeMass("measure has non-finite values")
    if np.any(arr < 0):
        bad = [G.vertices[i] for i in np.flatnonzero(arr < 0)]
        raise NegativeMass(f"negative mass at {bad}")
    outside = (arr != 0) & ~D.mask
    if outside.any():
        bad = [G.vertices[i] for i in np.flatnonzero(outside)]
        raise SupportOutsideDomain(f"measure charges vertices outside the domain: {bad}")
    arr.setflags(write=False)
    return SweepState(
        graph=G, domain=D, variant=variant, schedule=schedule or Schedule(),
        mu0=arr, mu=arr.copy(), u=np.zeros(G.n), boundary_accumulated=np.zeros(G.n),
        record_trace=record_trace,
    )


def _sweep_index(state, k):
    G = state.graph
    mu, u = state.mu, state.u
    acc, comp = state.boundary_accumulated, state.boundary_compensation
    deg = state._deg
    nbrs = G.neighbors[k]
    m = float(mu[k])
    mu[k] = 0.0
    if state.variant is NORMALIZED:
        u[k] += m
        for w in nbrs:
            mu[w] += m / deg[w]
    else:
        share = m / deg[k]
        u[k] += share
        for w in nbrs:
            mu[w] += share
    for w in nbrs:
        if state.boundary[w]:
            x, a = float(mu[w]), float(acc[w])
            t = a + x
            comp[w] += (a - t) + x if abs(a) >= abs(x) else (x - t) + a
            acc[w] = t
            mu[w] = 0.0
    state.step += 1

    # only x and its neighbours see a change in u or mu
    res = state._residual
    res[k] = state._local_residual(k)
    for w in nbrs:
        if state.domain.mask[w]:
            res[w] = state._local_residual(w)

    # plain left-to-right sums, matching the compiled kernel
    interior = bmass = 0.0
    for a, b, c, e, d in zip(mu.tolist(), state._wd.tolist(), acc.tolist(),
                             comp.tolist(), state._wb.tolist()):
        interior += a * b
        bmass += (c + e) * d
    state.last_interior = interior
    if state.record_trace:
        state.trace.append(state.step, k, m, interior, bmass, state.max_residual,
                           mu[k])
    return state


def sweep_step(state, xi):
    """Sweep the mass at domain vertex ``xi``; mutates and returns ``state``."""
    if xi not in state.domain.members:
        raise VertexNotInDomain(f"{xi!r} is not in the domain")
    return _sweep_index(state, state.graph.index[xi])


def default_max_steps(D):
    return max(10**6, 5000 * len(D))


def run_balayage(G, D, mu0, variant=NORMALIZED, schedule=None, tol=1e-12,
                 max_steps=None, record_trace=True):
    """Sweep until the interior mass drops below ``tol``.

    Returns ``(u, state)``; ``u`` vanishes on the boundary and solves
    ``-L u = mu0`` on ``D`` up to the mass left behind.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    state = init_sweep(G, D, mu0, variant, schedule, record_trace=record_trace)
    if max_steps is None:
        max_steps = default_max_steps(state.domain)
    nb_ptr, nb_idx = csr_neighbors(G)
    fixed = (state.mu, state.u, state.boundary_accumulated, state.boundary_compensation,
             state.mu0, state._residual,
             nb_ptr, nb_idx, state._deg, state.domain.mask, state.boundary,
             state._wd, state._wb, state.variant is NORMALIZED, record_trace)
    empty = np.zeros(0, dtype=np.intp)
    greedy_block = max(len(state.domain), 64)
    interior = state.last_interior
    for block in state.schedule.blocks(state.domain):
        if interior < tol:
            break
        if state.step >= max_steps:
            raise NotConverged(
                f"balayage not converged after {max_steps} steps "
                f"(interior mass {interior:.3e})",
                residual=interior, iterations=state.step)
        greedy = block is None
        nsteps = min(greedy_block if greedy else len(block), max_steps - state.step)
        trace = state.trace
        if record_trace:
            trace.reserve(nsteps)
        c = trace._cols
        done, interior = sweep_block(
            empty if greedy else block, greedy, nsteps, tol, interior, state.step,
            *fixed, len(trace),
            c["step"], c["vertex"], c["mass_before"], c["interior_mass_after"],
            c["boundary_mass_after"], c["max_residual"], c["swept_mass_after"])
        state.step += done
        if record_trace:
            trace._n += done
        state.last_interior = interior
    return state.u.copy(), state


@dataclass
class SweepReport:
    steps: int
    variant: str
    initial_mass: float
    interior_mass: float
    boundary_mass: float
    boundary_accumulated: dict
    boundary_accumulated_weighted: dict
    ledger_defect: float

    def to_dict(self):
        return {
            "steps": self.steps,
            "variant": self.variant,
            "initial_mass": self.initial_mass,
            "interior_mass": self.interior_mass,
            "boundary_mass": self.boundary_mass,
            "boundary_accumulated": self.boundary_accumulated,
            "boundary_accumulated_weighted": self.boundary_accumulated_weighted,
            "ledger_defect": self.ledger_defect,
        }


def sweep_report(state):
    """Steps taken, mass left inside, mass parked per boundary vertex, and the
    conservation ledger in the variant's weighting."""
    G = state.graph
    bidx = np.flatnonzero(state.boundary)
    parked = state.parked()
    acc = {G.vertices[i]: float(parked[i]) for i in bidx}
    accw = {G.vertices[i]: float(parked[i] * state.weights[i]) for i in bidx}
    interior = state.interior_mass
    boundary = state.boundary_mass
    return SweepReport(
        steps=state.step,
        variant=state.variant.value,
        initial_mass=state.initial_mass,
        interior_mass=interior,
        boundary_mass=boundary,
        boundary_accumulated=acc,
        boundary_accumulated_weighted=accw,
        ledger_defect=state.initial_mass - (interior + boundary),
    )


def write_trace_csv(trace, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRACE_FIELDS)
    for rec in trace:
        writer.writerow([rec.step, rec.swept_vertex, repr(rec.mass_before),
                         repr(rec.interior_mass_after), repr(rec.boundary_mass_after),
                         repr(rec.max_residual)])
