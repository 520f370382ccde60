"""Edge calculus on oriented graphs.

Vertex fields are arrays aligned with ``G.vertices`` and edge fields arrays
aligned with ``G.edges``; mappings are accepted wherever a field is expected.
Every operator works on float arrays and on object arrays of
:class:`fractions.Fraction`, so the integral identities can be checked in
exact arithmetic.
"""

import enum
from collections.abc import Mapping
from fractions import Fraction

import numpy as np

from .graph import as_domain, as_field_array, boundary_of


class LaplacianVariant(str, enum.Enum):
    NORMALIZED = "normalized"
    UNNORMALIZED = "unnormalized"


NORMALIZED = LaplacianVariant.NORMALIZED
UNNORMALIZED = LaplacianVariant.UNNORMALIZED


def as_variant(variant):
    return LaplacianVariant(variant)


def _zeros(n, like):
    if like.dtype == object:
        return np.array([Fraction(0)] * n, dtype=object)
    return np.zeros(n)


def _degrees(G, like):
    if like.dtype == object:
        return np.array([int(d) for d in G.degrees], dtype=object)
    return G.degrees


def gradient(G, U):
    """DU(e) = U(head) - U(tail)."""
    U = G.vertex_array(U, "U")
    return U[G.head] - U[G.tail]


def divergence(G, i):
    """Net outflow through the edges at each vertex, divided by the degree."""
    i = G.edge_array(i, "i")
    out = _zeros(G.n, i)
    np.add.at(out, G.tail, i)
    np.subtract.at(out, G.head, i)
    return out / _degrees(G, out)


def laplacian(G, U, variant=NORMALIZED):
    """Sum of neighbour differences U(w) - U(v), averaged for the normalized variant."""
    U = G.vertex_array(U, "U")
    out = _zeros(G.n, U)
    np.add.at(out, G._adj_rows, U[G._adj_cols] - U[G._adj_rows])
    if as_variant(variant) is NORMALIZED:
        out = out / _degrees(G, out)
    return out


def edge_dot(G, i, j):
    """Vertex field sum_{e at v} i(e) j(e) / (2 deg v)."""
    i = G.edge_array(i, "i")
    j = G.edge_array(j, "j")
    ij = i * j
    out = _zeros(G.n, ij)
    np.add.at(out, G.tail, ij)
    np.add.at(out, G.head, ij)
    return out / (2 * _degrees(G, out))


def edge_average(G, U):
    U = G.vertex_array(U, "U")
    return (U[G.head] + U[G.tail]) / 2


def vertex_product(U, W):
    return as_field_array(U) * as_field_array(W)


def edge_product(i, j):
    return as_field_array(i) * as_field_array(j)


def integrate_wrt_measure(U, mu):
    """Sum of U(v) mu(v) over all vertices.

    ``U`` and ``mu`` are aligned sequences, or mappings; with mappings the sum
    runs over the keys of ``mu``.
    """
    if isinstance(mu, Mapping):
        return sum(U[v] * m for v, m in mu.items())
    U = as_field_array(U)
    mu = as_field_array(mu)
    return _sum(U * mu)


def measure_of(G, mu, D):
    """mu(D), the total plain mass of ``mu`` on ``D``."""
    D = as_domain(G, D)
    mu = G.vertex_array(mu, "mu")
    return _sum(mu[D.mask])


def volume_integral(G, U, D):
    """Degree-weighted sum over the domain, sum_{v in D} U(v) deg(v)."""
    D = as_domain(G, D)
    U = G.vertex_array(U, "U")
    return _sum(U[D.indices] * _degrees(G, U)[D.indices])


def boundary_flux(G, i, D):
    """Sum over crossing edges of i(e) times the outward normal sign."""
    i = G.edge_array(i, "i")
    bd = boundary_of(G, D)
    signs = bd.normal_signs
    if i.dtype == object:
        signs = np.array([int(s) for s in signs], dtype=object)
    return _sum(i[bd.edge_indices] * signs)


def _sum(arr):
    if arr.dtype == object:
        return sum(arr.tolist(), Fraction(0))
    return float(np.sum(arr))


def check_divergence_theorem(G, i, D):
    """Return ``(volume integral of div i over D, boundary flux of i)``."""
    D = as_domain(G, D)
    return volume_integral(G, divergence(G, i), D), boundary_flux(G, i, D)


def check_integration_by_parts(G, U, i, D):
    """Return ``(lhs, boundary_term, volume_term)``; lhs should equal
    ``boundary_term - volume_term``."""
    D = as_domain(G, D)
    U = G.vertex_array(U, "U")
    i = G.edge_array(i, "i")
    lhs = volume_integral(G, vertex_product(U, divergence(G, i)), D)
    bd = boundary_of(G, D)
    ubar_i = edge_product(edge_average(G, U), i)
    signs = bd.normal_signs
    if ubar_i.dtype == object:
        signs = np.array([int(s) for s in signs], dtype=object)
    boundary_term = _sum(ubar_i[bd.edge_indices] * signs)
    volume_term = volume_integral(G, edge_dot(G, i, gradient(G, U)), D)
    return lhs, boundary_term, volume_term


def product_rule_sides(G, U, i):
    """Both sides of div(Ubar i) = U div i + i.DU, as vertex fields."""
    U = G.vertex_array(U, "U")
    i = G.edge_array(i, "i")
    lhs = divergence(G, edge_product(edge_average(G, U), i))
    rhs = vertex_product(U, divergence(G, i)) + edge_dot(G, i, gradient(G, U))
    return lhs, rhs
