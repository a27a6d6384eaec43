"""
Rate vectors that drive SAM toward its largest-bond performance bound.

Edges outside a largest bond get rates in strictly decreasing powers of one
scale M, so SAM contracts them first with probability tending to one and is
left with the two-vertex item-selection problem on the bond. Inside the bond
one edge gets rate M and the others rate 1.
"""

import csv
import logging
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import TextIO

from core.distributions import Instance
from core.exceptions import InvalidInstanceError
from core.graph import (
    DEFAULT_BOND_VERTEX_LIMIT,
    EdgeId,
    EdgeSubset,
    MultiGraph,
    largest_bond,
)
from core.stochastic import DEFAULT_EXACT_EDGE_LIMIT, alpha
from utils.helpers import format_float

logger = logging.getLogger(__name__)

CSV_HEADER = ("M", "alpha", "b", "graph")


@dataclass(frozen=True)
class TightConstruction:
    """A largest bond, the order its complement is contracted in, and the rates."""

    bond_witness: EdgeSubset
    contraction_order: tuple[EdgeId, ...]
    scale: float
    rates: Mapping[EdgeId, float]
    peak_edge: EdgeId | None

    def instance(self, g: MultiGraph) -> Instance:
        return Instance.exponential(g, self.rates, name=g.name)


@dataclass(frozen=True)
class SweepRow:
    """One scale of a tightness sweep."""

    scale: float
    alpha: float
    b: int
    graph: str

    def to_csv_row(self) -> list[str]:
        return [format_float(self.scale), format_float(self.alpha), str(self.b), self.graph]


def bfs_contraction_order(g: MultiGraph, witness: Iterable[EdgeId]) -> tuple[EdgeId, ...]:
    """
    Order the edges outside ``witness`` for contraction.

    Spanning forest edges of the two bond sides come first, in breadth-first
    discovery order starting from the lowest-indexed unvisited vertex; the
    remaining off-bond edges follow in graph order. Those are loops by the time
    they are reached.
    """
    witness = frozenset(witness)
    off_bond = [edge for edge in g.edges if edge.id not in witness]
    visited = [False] * g.n
    forest: list[EdgeId] = []
    for start in range(g.n):
        if visited[start]:
            continue
        visited[start] = True
        queue = deque([start])
        while queue:
            vertex = queue.popleft()
            for edge in off_bond:
                if vertex not in (edge.u, edge.v):
                    continue
                other = edge.other(vertex)
                if not visited[other]:
                    visited[other] = True
                    forest.append(edge.id)
                    queue.append(other)
    in_forest = set(forest)
    return tuple(forest) + tuple(edge.id for edge in off_bond if edge.id not in in_forest)


def tight_rate_vector(
    g: MultiGraph, m_scale: float, vertex_limit: int = DEFAULT_BOND_VERTEX_LIMIT
) -> TightConstruction:
    """
    Build tiered rates for ``g`` at scale ``m_scale``.

    With contraction order f_1..f_k the rates are M^(k-i+2) for f_i, M for the
    lexicographically first bond edge and 1 for the rest of the bond. A single
    vertex has no bond, no rates and no peak edge.

    Args:
        g: Connected graph
        m_scale: Scale M > 1

    Returns:
        TightConstruction
    """
    if not m_scale > 1:
        raise InvalidInstanceError(f"scale must exceed 1, got {m_scale}")
    _, witness = largest_bond(g, vertex_limit)
    order = bfs_contraction_order(g, witness)
    k = len(order)

    rates: dict[EdgeId, float] = {}
    for i, eid in enumerate(order, start=1):
        rates[eid] = float(m_scale) ** (k - i + 2)
    peak = min(witness, default=None)
    for eid in witness:
        rates[eid] = float(m_scale) if eid == peak else 1.0
    return TightConstruction(
        bond_witness=witness,
        contraction_order=order,
        scale=float(m_scale),
        rates={eid: rates[eid] for eid in g.edge_ids},
        peak_edge=peak,
    )


def sweep(
    g: MultiGraph,
    m_list: Iterable[float],
    edge_limit: int = DEFAULT_EXACT_EDGE_LIMIT,
    vertex_limit: int = DEFAULT_BOND_VERTEX_LIMIT,
) -> list[SweepRow]:
    """
    Exact alpha of the tight construction for each scale, sorted by scale.

    Raises:
        ValueError: if ``m_list`` is empty
        SizeGuardError: if the exact recursion is out of range
    """
    scales = sorted(float(m) for m in m_list)
    if not scales:
        raise ValueError("scale list is empty")
    b, _ = largest_bond(g, vertex_limit)
    rows = []
    for scale in scales:
        construction = tight_rate_vector(g, scale, vertex_limit)
        ratio = alpha(construction.instance(g), mode="exact", edge_limit=edge_limit)
        logger.info(f"Sweep {g.name or 'graph'}: M={scale:g} alpha={ratio:.6f} (b={b})")
        rows.append(SweepRow(scale=scale, alpha=ratio, b=b, graph=g.name))
    return rows


def write_sweep_csv(rows: Iterable[SweepRow], stream: TextIO) -> None:
    """Write sweep rows with header ``M,alpha,b,graph``."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.to_csv_row())
