"""
Loopless multigraphs with stable edge identities.

This module implements:
- Minors: edge contraction (with eager loop deletion) and edge deletion
- Connectivity, cut sets and bonds (inclusion-wise minimal cut sets)
- Largest-bond search by vertex bipartition enumeration
- Kruskal's algorithm with an explicit tie-break order on edge ids
- Fundamental cycles and exhaustive spanning tree enumeration

All graph values are immutable; every operation returns a new value.
"""

import itertools
import logging
import math
from collections import deque
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from core.exceptions import (
    DisconnectedGraphError,
    InvalidEdgeSetError,
    InvalidInstanceError,
    InvalidMinorError,
    SizeGuardError,
)

logger = logging.getLogger(__name__)

EdgeId = str
EdgeSubset = frozenset[str]
SpanningTree = frozenset[str]
TieBreak = Callable[[str], Any]

DEFAULT_BOND_VERTEX_LIMIT = 16
DEFAULT_ENUMERATION_EDGE_LIMIT = 20


# ============================================================================
# Value Objects
# ============================================================================


@dataclass(frozen=True)
class Edge:
    """An edge with a stable identity and two distinct endpoints."""

    id: EdgeId
    u: int
    v: int

    def other(self, vertex: int) -> int:
        """Return the endpoint opposite to ``vertex``."""
        return self.v if vertex == self.u else self.u


class DisjointSet:
    """Union-find over ``0..size-1`` with path halving and union by size."""

    def __init__(self, size: int):
        self._parent = list(range(size))
        self._size = [1] * size

    def find(self, x: int) -> int:
        parent = self._parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of ``a`` and ``b``; return False if already merged."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        return True


@dataclass(frozen=True)
class MultiGraph:
    """
    Loopless multigraph on vertices ``0..n-1``.

    Parallel edges are allowed, loops are not. Edge ids are unique and are
    never reused by minor operations.
    """

    n: int
    edges: tuple[Edge, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.n < 1:
            raise InvalidInstanceError(f"graph needs at least one vertex, got n={self.n}")
        seen: set[EdgeId] = set()
        for edge in self.edges:
            if edge.id in seen:
                raise InvalidInstanceError(f"duplicate edge id {edge.id!r}")
            seen.add(edge.id)
            for vertex in (edge.u, edge.v):
                if not 0 <= vertex < self.n:
                    raise InvalidInstanceError(
                        f"edge {edge.id!r} has endpoint {vertex} outside [0, {self.n})"
                    )
            if edge.u == edge.v:
                raise InvalidInstanceError(f"edge {edge.id!r} is a loop at vertex {edge.u}")

    @classmethod
    def from_pairs(
        cls,
        n: int,
        pairs: Iterable[tuple[int, int]],
        ids: Sequence[EdgeId] | None = None,
        name: str = "",
    ) -> "MultiGraph":
        """
        Build a graph from endpoint pairs.

        Args:
            n: Vertex count
            pairs: Endpoint pairs, one per edge
            ids: Edge ids; defaults to ``e1, e2, ...``
            name: Optional display name

        Returns:
            MultiGraph instance
        """
        pairs = list(pairs)
        if ids is None:
            ids = [f"e{i}" for i in range(1, len(pairs) + 1)]
        if len(ids) != len(pairs):
            raise InvalidInstanceError("number of edge ids does not match number of pairs")
        edges = tuple(Edge(eid, u, v) for eid, (u, v) in zip(ids, pairs, strict=True))
        return cls(n=n, edges=edges, name=name)

    @cached_property
    def _index(self) -> dict[EdgeId, Edge]:
        return {edge.id: edge for edge in self.edges}

    @property
    def edge_ids(self) -> tuple[EdgeId, ...]:
        return tuple(edge.id for edge in self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, eid: EdgeId) -> bool:
        return eid in self._index

    def edge(self, eid: EdgeId) -> Edge:
        """Return the edge with id ``eid``."""
        try:
            return self._index[eid]
        except KeyError:
            raise InvalidEdgeSetError(f"edge {eid!r} is not in the graph") from None

    def endpoints(self, eid: EdgeId) -> tuple[int, int]:
        edge = self.edge(eid)
        return edge.u, edge.v

    def with_name(self, name: str) -> "MultiGraph":
        return MultiGraph(n=self.n, edges=self.edges, name=name)


def tie_order(ids: Sequence[EdgeId]) -> TieBreak:
    """
    Build a tie-break key from an explicit sequence of edge ids.

    Ids missing from the sequence sort after all listed ids, lexicographically.
    """
    position = {eid: i for i, eid in enumerate(ids)}
    last = len(position)
    return lambda eid: (position.get(eid, last), eid)


def tie_key(tie_break: TieBreak | None) -> TieBreak:
    """The given key, or plain edge id order when it is None."""
    return tie_break if tie_break is not None else (lambda eid: eid)


# ============================================================================
# Minors
# ============================================================================


def contract(g: MultiGraph, e: EdgeId) -> tuple[MultiGraph, dict[int, int]]:
    """
    Contract edge ``e``, merging its endpoints and deleting resulting loops.

    Args:
        g: Graph to contract
        e: Id of the edge to contract

    Returns:
        Tuple of (contracted graph, old-vertex to new-vertex map)
    """
    if not g.has_edge(e):
        raise InvalidMinorError(f"cannot contract unknown edge {e!r}")
    edge = g.edge(e)
    lo, hi = min(edge.u, edge.v), max(edge.u, edge.v)

    mapping: dict[int, int] = {}
    next_index = 0
    for vertex in range(g.n):
        if vertex == hi:
            continue
        mapping[vertex] = next_index
        next_index += 1
    mapping[hi] = mapping[lo]

    kept = []
    for other in g.edges:
        u, v = mapping[other.u], mapping[other.v]
        if u == v:
            # e itself and every edge parallel to it
            continue
        kept.append(Edge(other.id, u, v))
    return MultiGraph(n=g.n - 1, edges=tuple(kept), name=g.name), mapping


def delete(g: MultiGraph, e: EdgeId) -> MultiGraph:
    """Remove edge ``e``; the vertex set is unchanged."""
    if not g.has_edge(e):
        raise InvalidMinorError(f"cannot delete unknown edge {e!r}")
    return MultiGraph(n=g.n, edges=tuple(x for x in g.edges if x.id != e), name=g.name)


def contract_sequence(g: MultiGraph, ids: Iterable[EdgeId]) -> MultiGraph:
    """
    Contract edges in order.

    Edges of ``g`` that already vanished as loops of an earlier contraction
    are skipped; ids that were never in ``g`` are an error.
    """
    current = g
    for eid in ids:
        if not g.has_edge(eid):
            raise InvalidMinorError(f"cannot contract unknown edge {eid!r}")
        if not current.has_edge(eid):
            logger.debug(f"Edge {eid} already removed as a loop, skipping")
            continue
        current, _ = contract(current, eid)
    return current


# ============================================================================
# Connectivity and bonds
# ============================================================================


def component_labels(n: int, edges: Iterable[Edge]) -> list[int]:
    """Label each vertex with the smallest vertex of its component."""
    dsu = DisjointSet(n)
    for edge in edges:
        dsu.union(edge.u, edge.v)
    smallest: dict[int, int] = {}
    labels = []
    for vertex in range(n):
        root = dsu.find(vertex)
        labels.append(smallest.setdefault(root, vertex))
    return labels


def components(g: MultiGraph) -> list[frozenset[int]]:
    """Return the connected components of ``g`` ordered by smallest vertex."""
    groups: dict[int, set[int]] = {}
    for vertex, label in enumerate(component_labels(g.n, g.edges)):
        groups.setdefault(label, set()).add(vertex)
    return [frozenset(groups[label]) for label in sorted(groups)]


def is_connected(g: MultiGraph) -> bool:
    return len(components(g)) == 1


def _require_connected(g: MultiGraph, operation: str) -> None:
    if not is_connected(g):
        raise DisconnectedGraphError(f"{operation} requires a connected graph")


def _require_subset(g: MultiGraph, s: Iterable[EdgeId]) -> EdgeSubset:
    subset = frozenset(s)
    unknown = sorted(eid for eid in subset if not g.has_edge(eid))
    if unknown:
        raise InvalidEdgeSetError(f"edges {unknown} are not in the graph")
    return subset


def cut_edges(g: MultiGraph, side: Iterable[int]) -> EdgeSubset:
    """Return the edges with exactly one endpoint in ``side``."""
    side = set(side)
    return frozenset(edge.id for edge in g.edges if (edge.u in side) != (edge.v in side))


def is_bond(g: MultiGraph, s: Iterable[EdgeId]) -> bool:
    """
    Check whether ``s`` is a bond of connected graph ``g``.

    A bond is exactly the edge set between a bipartition (S, V-S) whose two
    induced sides are connected: removing it leaves exactly two components
    and every removed edge runs between them.
    """
    _require_connected(g, "is_bond")
    subset = _require_subset(g, s)
    rest = [edge for edge in g.edges if edge.id not in subset]
    labels = component_labels(g.n, rest)
    if len(set(labels)) != 2:
        return False
    side = {vertex for vertex, label in enumerate(labels) if label == 0}
    return cut_edges(g, side) == subset


def _side_connected(g: MultiGraph, side: set[int]) -> bool:
    start = next(iter(side))
    seen = {start}
    queue = deque([start])
    while queue:
        vertex = queue.popleft()
        for edge in g.edges:
            if vertex not in (edge.u, edge.v):
                continue
            other = edge.other(vertex)
            if other in side and other not in seen:
                seen.add(other)
                queue.append(other)
    return len(seen) == len(side)


def all_bonds(g: MultiGraph, vertex_limit: int = DEFAULT_BOND_VERTEX_LIMIT) -> list[EdgeSubset]:
    """
    Enumerate every bond of connected graph ``g``.

    Vertex 0 is fixed on one side and the other side runs over the non-empty
    subsets of ``1..n-1`` in increasing bitmask order, so the order is
    deterministic.

    Raises:
        DisconnectedGraphError: if ``g`` is not connected
        SizeGuardError: if ``g.n`` exceeds ``vertex_limit``
    """
    _require_connected(g, "bond enumeration")
    if g.n > vertex_limit:
        raise SizeGuardError(
            f"bond enumeration over {g.n} vertices exceeds the limit of {vertex_limit}"
        )
    bonds = []
    others = list(range(1, g.n))
    for mask in range(1, 1 << (g.n - 1)):
        far = {others[i] for i in range(g.n - 1) if mask >> i & 1}
        near = set(range(g.n)) - far
        if _side_connected(g, near) and _side_connected(g, far):
            bonds.append(cut_edges(g, near))
    return bonds


def largest_bond(
    g: MultiGraph, vertex_limit: int = DEFAULT_BOND_VERTEX_LIMIT
) -> tuple[int, EdgeSubset]:
    """
    Find a maximum cardinality bond.

    The witness is the first maximiser in the enumeration order of
    :func:`all_bonds`; maximum bonds are not unique in general. A single
    vertex graph has no bond and yields ``(0, frozenset())``.

    Returns:
        Tuple of (bond size, witness edge set)
    """
    best: EdgeSubset = frozenset()
    for bond in all_bonds(g, vertex_limit):
        if len(bond) > len(best):
            best = bond
    return len(best), best


# ============================================================================
# Spanning trees
# ============================================================================


def is_spanning_tree(g: MultiGraph, t: Iterable[EdgeId]) -> bool:
    tree = frozenset(t)
    if len(tree) != g.n - 1 or any(not g.has_edge(eid) for eid in tree):
        return False
    dsu = DisjointSet(g.n)
    return all(dsu.union(*g.endpoints(eid)) for eid in tree)


def tree_weight(t: Iterable[EdgeId], weights: Mapping[EdgeId, float]) -> float:
    return math.fsum(weights[eid] for eid in t)


def greedy_forest(g: MultiGraph, order: Iterable[EdgeId]) -> SpanningTree:
    """Scan edges in ``order`` and keep every edge joining two components."""
    dsu = DisjointSet(g.n)
    chosen = []
    for eid in order:
        if dsu.union(*g.endpoints(eid)):
            chosen.append(eid)
            if len(chosen) == g.n - 1:
                break
    return frozenset(chosen)


def kruskal_mst(
    g: MultiGraph,
    weights: Mapping[EdgeId, float],
    tie_break: TieBreak | None = None,
) -> SpanningTree:
    """
    Minimum spanning tree by Kruskal's algorithm.

    Edges are processed in (weight, tie_break(id)) order, so among several
    minimum trees the result is fixed by the tie-break order.

    Args:
        g: Connected graph
        weights: Finite weight per edge id
        tie_break: Key function on edge ids; lexicographic by default

    Returns:
        Edge ids of the tree
    """
    _require_connected(g, "kruskal_mst")
    for eid in g.edge_ids:
        if eid not in weights:
            raise InvalidInstanceError(f"no weight given for edge {eid!r}")
        if not math.isfinite(weights[eid]):
            raise InvalidInstanceError(f"weight of edge {eid!r} is not finite")
    key = tie_key(tie_break)
    order = sorted(g.edge_ids, key=lambda eid: (weights[eid], key(eid)))
    return greedy_forest(g, order)


def tree_path(g: MultiGraph, t: Iterable[EdgeId], source: int, target: int) -> EdgeSubset:
    """Return the edges of the unique ``source``-``target`` path inside tree ``t``."""
    adjacency: dict[int, list[Edge]] = {}
    for eid in t:
        edge = g.edge(eid)
        adjacency.setdefault(edge.u, []).append(edge)
        adjacency.setdefault(edge.v, []).append(edge)

    parent: dict[int, Edge | None] = {source: None}
    queue = deque([source])
    while queue and target not in parent:
        vertex = queue.popleft()
        for edge in adjacency.get(vertex, []):
            other = edge.other(vertex)
            if other not in parent:
                parent[other] = edge
                queue.append(other)

    path = set()
    vertex = target
    while parent[vertex] is not None:
        edge = parent[vertex]
        path.add(edge.id)
        vertex = edge.other(vertex)
    return frozenset(path)


def fundamental_cycle(g: MultiGraph, t: Iterable[EdgeId], e: EdgeId) -> EdgeSubset:
    """
    Return the unique cycle in ``t + e``; it contains ``e``.

    Raises:
        InvalidEdgeSetError: if ``t`` is not a spanning tree of ``g`` or ``e`` is in ``t``
    """
    tree = frozenset(t)
    if not is_spanning_tree(g, tree):
        raise InvalidEdgeSetError("fundamental_cycle needs a spanning tree of the graph")
    if e in tree:
        raise InvalidEdgeSetError(f"edge {e!r} belongs to the tree")
    u, v = g.endpoints(e)
    return tree_path(g, tree, u, v) | {e}


def enumerate_spanning_trees(
    g: MultiGraph, edge_limit: int = DEFAULT_ENUMERATION_EDGE_LIMIT
) -> list[SpanningTree]:
    """
    List every spanning tree of ``g`` exactly once.

    Candidates are the (n-1)-subsets of edges in combination order; a
    disconnected graph has none.

    Raises:
        SizeGuardError: if the graph has more than ``edge_limit`` edges
    """
    if g.edge_count > edge_limit:
        raise SizeGuardError(
            f"spanning tree enumeration over {g.edge_count} edges exceeds the limit of {edge_limit}"
        )
    trees = []
    for combo in itertools.combinations(g.edge_ids, g.n - 1):
        dsu = DisjointSet(g.n)
        if all(dsu.union(*g.endpoints(eid)) for eid in combo):
            trees.append(frozenset(combo))
    return trees
