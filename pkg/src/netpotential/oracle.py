"""Direct solver for the Dirichlet/Poisson system on a graph domain.

Unknowns are the values on the domain ``D``; boundary values are moved to
the right-hand side and the dense system is solved by LU factorisation with
partial pivoting (LAPACK ``gesv`` through :func:`numpy.linalg.solve`).
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .calculus import NORMALIZED, as_variant
from .errors import InconsistentData, SingularSystem
from .graph import Domain, as_domain, boundary_mask, boundary_of

log = logging.getLogger(__name__)


@dataclass
class DirichletProblem:
    """-L u = rhs on ``domain``, u = boundary_values on its boundary.

    ``rhs`` and ``boundary_values`` may be mappings (missing rhs entries are 0)
    or full vertex arrays; ``None`` means identically zero.
    """

    graph: object
    domain: Domain
    rhs: object = None
    boundary_values: object = None
    variant: str = NORMALIZED
    notes: list = field(default_factory=list, compare=False)

    def __post_init__(self):
        self.domain = as_domain(self.graph, self.domain)
        self.variant = as_variant(self.variant)

    def rhs_array(self):
        G, D = self.graph, self.domain
        f = np.zeros(G.n)
        if self.rhs is None:
            return f
        if isinstance(self.rhs, Mapping):
            for v, x in self.rhs.items():
                if v not in G.index:
                    raise InconsistentData(f"rhs given at unknown vertex {v!r}")
                if v not in D.members:
                    if x != 0:
                        raise InconsistentData(f"rhs nonzero at {v!r}, outside the domain")
                    continue
                f[G.index[v]] = float(x)
        else:
            f[D.mask] = G.vertex_array(self.rhs, "rhs").astype(float)[D.mask]
        if not np.all(np.isfinite(f)):
            raise InconsistentData("rhs has non-finite values")
        return f

    def boundary_array(self):
        G = self.graph
        bmask = boundary_mask(G, self.domain)
        g = np.zeros(G.n)
        if self.boundary_values is None:
            return g
        if isinstance(self.boundary_values, Mapping):
            bd = boundary_of(G, self.domain).vertices
            extra = [v for v in self.boundary_values if v not in bd]
            if extra:
                raise InconsistentData(f"boundary values given off the boundary: {extra}")
            missing = [v for v in bd if v not in self.boundary_values]
            if missing:
                raise InconsistentData(f"boundary values missing at {sorted(missing, key=G.index.get)}")
            for v, x in self.boundary_values.items():
                g[G.index[v]] = float(x)
        else:
            g[bmask] = G.vertex_array(self.boundary_values, "g").astype(float)[bmask]
        if not np.all(np.isfinite(g)):
            raise InconsistentData("boundary values are not finite")
        return g


def system_matrix(G, D, variant=NORMALIZED):
    """Matrix of -L restricted to the domain (rows and columns ``D.indices``)."""
    D = as_domain(G, D)
    variant = as_variant(variant)
    idx = D.indices
    pos = np.full(G.n, -1)
    pos[idx] = np.arange(len(idx))
    A = np.zeros((len(idx), len(idx)))
    for r, v in enumerate(idx):
        deg = G.degrees[v]
        scale = 1.0 / deg if variant is NORMALIZED else 1.0
        A[r, r] = deg * scale
        for w in G.neighbors[v]:
            if pos[w] >= 0:
                A[r, pos[w]] -= scale
    return A


def boundary_coupling(G, D, g, variant=NORMALIZED):
    """Contribution of the boundary values to the right-hand side on ``D``."""
    D = as_domain(G, D)
    variant = as_variant(variant)
    b = np.zeros(len(D.indices))
    for r, v in enumerate(D.indices):
        s = sum(g[w] for w in G.neighbors[v] if not D.mask[w])
        b[r] = s / G.degrees[v] if variant is NORMALIZED else s
    return b


def _solve(A, B):
    try:
        X = np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"Dirichlet system is singular: {exc}") from None
    if not np.all(np.isfinite(X)):
        raise SingularSystem("Dirichlet system produced non-finite values")
    return X


def dirichlet_solve(p):
    """Solve a :class:`DirichletProblem`; returns a vertex array.

    Vertices outside the closure of the domain get 0, and a note is appended
    to ``p.notes``.
    """
    G, D = p.graph, p.domain
    f = p.rhs_array()
    g = p.boundary_array()
    bmask = boundary_mask(G, D)
    if not bmask.any():
        raise SingularSystem("domain has an empty boundary")
    A = system_matrix(G, D, p.variant)
    b = f[D.indices] + boundary_coupling(G, D, g, p.variant)
    u = np.zeros(G.n)
    u[D.indices] = _solve(A, b)
    u[bmask] = g[bmask]
    outside = ~(D.mask | bmask)
    if outside.any():
        names = [G.vertices[i] for i in np.flatnonzero(outside)]
        note = f"{len(names)} vertices outside the closure set to 0: {names}"
        p.notes.append(note)
        log.info(note)
    return u


def dirichlet_residual(G, D, u, rhs, variant=NORMALIZED):
    """max over D of |-L u - rhs|."""
    from .calculus import laplacian

    D = as_domain(G, D)
    r = -laplacian(G, u, variant) - G.vertex_array(rhs, "rhs")
    return float(np.max(np.abs(r[D.indices])))
