"""Finite simple connected graphs with fixed edge orientations.

Every undirected edge is stored once, oriented ``(tail, head)`` in input
order. Vertices get dense indices in input order, and all vertex fields are
numpy arrays aligned with :attr:`Graph.vertices`; edge fields are aligned
with :attr:`Graph.edges`.
"""

from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    Disconnected,
    DomainContainsInfinity,
    DuplicateVertex,
    DuplicateEdge,
    EmptyDomain,
    InfinityNotAVertex,
    MissingEdgeValue,
    MissingVertexValue,
    SelfLoop,
    UnknownVertex,
    UnknownVertexInEdge,
)

EDGE_ARROW = "→"


def edge_key(edge):
    """Serialized form ``"tail→head"`` of an oriented edge."""
    return f"{edge[0]}{EDGE_ARROW}{edge[1]}"


def as_field_array(values):
    """Coerce a sequence of scalars to a float array, or an object array when
    the values are exact rationals."""
    arr = np.asarray(values)
    if arr.dtype == object:
        if all(isinstance(x, (int, Fraction)) for x in arr.flat):
            return arr
        return arr.astype(float)
    if arr.dtype.kind in "biu":
        return arr.astype(float)
    return arr


class Graph:
    """Immutable finite simple connected graph with an ``infinity`` vertex.

    :param vertices: vertex identifiers, in the order defining dense indices
    :param edges: oriented pairs ``(tail, head)``
    :param infinity: the designated vertex playing the role of infinity
    """

    def __init__(self, vertices, edges, infinity):
        self.vertices = tuple(vertices)
        self.index = {}
        for i, v in enumerate(self.vertices):
            if v in self.index:
                raise DuplicateVertex(f"vertex {v!r} listed twice")
            self.index[v] = i
        if infinity not in self.index:
            raise InfinityNotAVertex(f"infinity {infinity!r} is not a vertex")
        self.infinity = infinity
        self.infinity_index = self.index[infinity]

        seen = set()
        edge_list = []
        for e in edges:
            tail, head = e
            for end in (tail, head):
                if end not in self.index:
                    raise UnknownVertexInEdge(
                        f"edge ({tail!r}, {head!r}) references unknown vertex {end!r}")
            if tail == head:
                raise SelfLoop(f"self-loop at {tail!r}")
            pair = frozenset((tail, head))
            if pair in seen:
                raise DuplicateEdge(f"duplicate edge between {tail!r} and {head!r}")
            seen.add(pair)
            edge_list.append((tail, head))
        self.edges = tuple(edge_list)
        self.edge_index = {e: k for k, e in enumerate(self.edges)}

        n = len(self.vertices)
        self.tail = np.array([self.index[t] for t, _ in self.edges], dtype=np.intp)
        self.head = np.array([self.index[h] for _, h in self.edges], dtype=np.intp)
        nbrs = [[] for _ in range(n)]
        for t, h in zip(self.tail.tolist(), self.head.tolist()):
            nbrs[t].append(h)
            nbrs[h].append(t)
        self.neighbors = tuple(tuple(ns) for ns in nbrs)
        self.degrees = np.array([len(ns) for ns in nbrs], dtype=np.intp)
        self.degrees.setflags(write=False)
        self.tail.setflags(write=False)
        self.head.setflags(write=False)

        # flattened neighbour lists, used by the Laplacian
        self._adj_rows = np.repeat(np.arange(n, dtype=np.intp), self.degrees)
        self._adj_cols = np.array([w for ns in nbrs for w in ns], dtype=np.intp)

        self._check_connected()
        self._cache = {}

    def _check_connected(self):
        n = len(self.vertices)
        if n == 1:
            return
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w in self.neighbors[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        if not seen.all():
            missing = [self.vertices[i] for i in np.flatnonzero(~seen)]
            raise Disconnected(f"vertices unreachable from {self.vertices[0]!r}: {missing}")

    def __repr__(self):
        return (f"Graph(n={self.n}, m={self.m}, infinity={self.infinity!r})")

    @property
    def n(self):
        return len(self.vertices)

    @property
    def m(self):
        return len(self.edges)

    @property
    def adjacency(self):
        """Map vertex -> frozenset of neighbouring vertices."""
        vs = self.vertices
        return {v: frozenset(vs[w] for w in self.neighbors[i]) for i, v in enumerate(vs)}

    @property
    def degree_map(self):
        return {v: int(d) for v, d in zip(self.vertices, self.degrees)}

    def degree(self, v):
        return int(self.degrees[self.index[v]])

    def is_regular(self):
        return bool(np.all(self.degrees == self.degrees[0]))

    def incident_edges(self, v):
        """Edges having ``v`` as tail or head, in edge order."""
        return [e for e in self.edges if v in e]

    # -- field conversion -------------------------------------------------

    def vertex_array(self, values, name="field"):
        """Return ``values`` as an array aligned with :attr:`vertices`.

        Accepts a mapping keyed by vertex or a sequence of length ``n``.
        """
        if isinstance(values, Mapping):
            try:
                seq = [values[v] for v in self.vertices]
            except KeyError as exc:
                raise MissingVertexValue(f"{name} has no value at vertex {exc.args[0]!r}") from None
            return as_field_array(seq)
        arr = as_field_array(values)
        if arr.shape != (self.n,):
            raise MissingVertexValue(f"{name} has shape {arr.shape}, expected ({self.n},)")
        return arr

    def edge_array(self, values, name="edge field"):
        """Return ``values`` as an array aligned with :attr:`edges`.

        Mapping keys may be ``(tail, head)`` tuples or ``"tail→head"`` strings.
        """
        if isinstance(values, Mapping):
            seq = []
            for e in self.edges:
                if e in values:
                    seq.append(values[e])
                elif edge_key(e) in values:
                    seq.append(values[edge_key(e)])
                else:
                    raise MissingEdgeValue(f"{name} has no value on edge {edge_key(e)!r}")
            return as_field_array(seq)
        arr = as_field_array(values)
        if arr.shape != (self.m,):
            raise MissingEdgeValue(f"{name} has shape {arr.shape}, expected ({self.m},)")
        return arr

    def vertex_map(self, arr):
        return {v: _scalar(x) for v, x in zip(self.vertices, arr)}

    def edge_map(self, arr):
        return {edge_key(e): _scalar(x) for e, x in zip(self.edges, arr)}

    def domain(self, members):
        return Domain(self, members)

    def with_flipped(self, edges_to_flip):
        """Copy of the graph with the orientation of the given edges reversed."""
        flip = {self.edge_index[tuple(e)] if not isinstance(e, (int, np.integer)) else int(e)
                for e in edges_to_flip}
        edges = [(h, t) if k in flip else (t, h) for k, (t, h) in enumerate(self.edges)]
        return Graph(self.vertices, edges, self.infinity)

    def to_dict(self):
        return {
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
            "infinity": self.infinity,
        }


def _scalar(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, np.generic):
        return x.item()
    return x


def build_graph(desc):
    """Build a validated :class:`Graph` from a description mapping.

    ``desc`` has keys ``"vertices"``, ``"edges"`` (``[tail, head]`` pairs) and
    ``"infinity"``. A :class:`Graph` instance is returned unchanged.
    """
    if isinstance(desc, Graph):
        return desc
    try:
        vertices = desc["vertices"]
        edges = desc["edges"]
        infinity = desc["infinity"]
    except KeyError as exc:
        raise KeyError(f"graph description lacks field {exc.args[0]!r}") from None
    edges = [tuple(e) for e in edges]
    for e in edges:
        if len(e) != 2:
            raise UnknownVertexInEdge(f"edge {list(e)!r} is not a [tail, head] pair")
    return Graph(vertices, edges, infinity)


@dataclass(frozen=True)
class Domain:
    """Nonempty vertex subset excluding the infinity vertex."""

    graph: Graph = field(repr=False, compare=False)
    members: frozenset

    def __init__(self, graph, members):
        members = frozenset(members)
        if not members:
            raise EmptyDomain("domain is empty")
        for v in members:
            if v not in graph.index:
                raise UnknownVertex(f"domain vertex {v!r} is not in the graph")
        if graph.infinity in members:
            raise DomainContainsInfinity(f"domain contains the infinity vertex {graph.infinity!r}")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "members", members)
        mask = np.zeros(graph.n, dtype=bool)
        mask[[graph.index[v] for v in members]] = True
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        idx = np.flatnonzero(mask)
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __contains__(self, v):
        return v in self.members

    def __iter__(self):
        vs = self.graph.vertices
        return (vs[i] for i in self.indices)

    def __len__(self):
        return len(self.members)


def as_domain(G, D):
    if isinstance(D, Domain):
        if D.graph is not G and D.graph.vertices != G.vertices:
            raise UnknownVertex("domain belongs to a different graph")
        if D.graph is not G:
            return Domain(G, D.members)
        return D
    return Domain(G, D)


@dataclass(frozen=True)
class BoundaryData:
    """Boundary of a domain.

    ``normal[e]`` is +1 when the tail of ``e`` lies in the domain (flow leaves
    through the head) and -1 when the head does.
    """

    plus_vertices: frozenset
    minus_vertices: frozenset
    crossing_edges: tuple
    normal: dict
    edge_indices: np.ndarray = field(repr=False, compare=False)
    normal_signs: np.ndarray = field(repr=False, compare=False)

    @property
    def vertices(self):
        return self.plus_vertices | self.minus_vertices


def boundary_of(G, D):
    """Compute the boundary vertices, crossing edges and edge normals of ``D``."""
    D = as_domain(G, D)
    key = ("boundary", D.members)
    cached = G._cache.get(key)
    if cached is not None:
        return cached
    in_tail = D.mask[G.tail]
    in_head = D.mask[G.head]
    crossing = np.flatnonzero(in_tail != in_head)
    signs = np.where(in_tail[crossing], 1, -1).astype(np.intp)
    plus, minus = set(), set()
    normal = {}
    for k, s in zip(crossing.tolist(), signs.tolist()):
        e = G.edges[k]
        normal[e] = s
        if s > 0:
            plus.add(e[1])
        else:
            minus.add(e[0])
    crossing.setflags(write=False)
    signs.setflags(write=False)
    bd = BoundaryData(
        plus_vertices=frozenset(plus),
        minus_vertices=frozenset(minus),
        crossing_edges=tuple(G.edges[k] for k in crossing),
        normal=normal,
        edge_indices=crossing,
        normal_signs=signs,
    )
    G._cache.setdefault(key, bd)
    return bd


def boundary_mask(G, D):
    bd = boundary_of(G, D)
    mask = np.zeros(G.n, dtype=bool)
    if bd.vertices:
        mask[[G.index[v] for v in bd.vertices]] = True
    return mask


@dataclass
class DomainDiagnostics:
    ok: bool
    violations: list
    boundary_nonempty: bool
    components: list
    component_boundaries: list


def validate_domain(G, members):
    """Report on a candidate domain without raising.

    Components and their boundaries are listed as tuples in vertex input order.
    """
    members = list(members)
    violations = []
    unknown = [v for v in members if v not in G.index]
    if unknown:
        violations.append(("UnknownVertex", unknown))
    if not members:
        violations.append(("EmptyDomain", []))
    if G.infinity in members:
        violations.append(("DomainContainsInfinity", [G.infinity]))
    known = {v for v in members if v in G.index}

    in_set = np.zeros(G.n, dtype=bool)
    if known:
        in_set[[G.index[v] for v in known]] = True
    comp_id = np.full(G.n, -1)
    components = []
    for start in range(G.n):
        if not in_set[start] or comp_id[start] >= 0:
            continue
        cid = len(components)
        comp_id[start] = cid
        stack, comp = [start], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in G.neighbors[v]:
                if in_set[w] and comp_id[w] < 0:
                    comp_id[w] = cid
                    stack.append(w)
        components.append(sorted(comp))
    boundaries = []
    for comp in components:
        bd = sorted({w for v in comp for w in G.neighbors[v] if not in_set[w]})
        boundaries.append(tuple(G.vertices[i] for i in bd))
    boundary_nonempty = any(boundaries)
    if known and not boundary_nonempty:
        violations.append(("EmptyBoundary", []))
    return DomainDiagnostics(
        ok=not violations,
        violations=violations,
        boundary_nonempty=boundary_nonempty,
        components=[tuple(G.vertices[i] for i in c) for c in components],
        component_boundaries=boundaries,
    )
