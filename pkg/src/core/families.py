"""Named graphs, exhaustive small multigraph families and random rate vectors."""

import itertools
import logging
import math
from collections.abc import Iterator, Sequence

import networkx as nx
import numpy as np

from core.graph import EdgeId, MultiGraph, is_connected

logger = logging.getLogger(__name__)

RATE_LOW = 1e-2
RATE_HIGH = 1e2


def complete(n: int) -> MultiGraph:
    return MultiGraph.from_pairs(n, itertools.combinations(range(n), 2), name=f"K{n}")


def path(n: int) -> MultiGraph:
    return MultiGraph.from_pairs(n, [(i, i + 1) for i in range(n - 1)], name=f"P{n}")


def cycle(n: int) -> MultiGraph:
    return MultiGraph.from_pairs(n, [(i, (i + 1) % n) for i in range(n)], name=f"C{n}")


def parallel(b: int) -> MultiGraph:
    """Two vertices joined by ``b`` parallel edges."""
    return MultiGraph.from_pairs(2, [(0, 1)] * b, name=f"parallel-{b}")


def bond_illustration() -> MultiGraph:
    """
    Five vertices, six edges: vertices 0 and 4 are both joined to 1, 2 and 3.

    ``{e1, e3, e5, e6}`` is a cut set leaving three components and
    ``{e1, e5, e6}`` is a bond splitting off ``{3, 4}``.
    """
    pairs = [(0, 3), (0, 2), (0, 1), (4, 3), (4, 2), (4, 1)]
    return MultiGraph.from_pairs(5, pairs, name="bond-illustration")


def contraction_illustration() -> MultiGraph:
    """
    Nine vertices around the edge ``uv`` = (0, 1); vertex 2 neighbours both.

    Contracting ``uv`` merges 0 and 1 and leaves two parallel edges to 2.
    """
    pairs = [
        (0, 1),  # uv
        (1, 6), (1, 7), (1, 8), (1, 2),
        (0, 3), (0, 4), (0, 5), (0, 2),
        (7, 6), (7, 8), (3, 4), (3, 2),
    ]  # fmt: skip
    ids = ["uv"] + [f"e{i}" for i in range(1, len(pairs))]
    return MultiGraph.from_pairs(9, pairs, ids=ids, name="contraction-illustration")


def _to_networkx(g: MultiGraph) -> nx.MultiGraph:
    nxg = nx.MultiGraph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from((edge.u, edge.v) for edge in g.edges)
    return nxg


def _invariant(g: MultiGraph) -> tuple:
    degrees = [0] * g.n
    multiplicity: dict[tuple[int, int], int] = {}
    for edge in g.edges:
        degrees[edge.u] += 1
        degrees[edge.v] += 1
        pair = (min(edge.u, edge.v), max(edge.u, edge.v))
        multiplicity[pair] = multiplicity.get(pair, 0) + 1
    return g.n, g.edge_count, tuple(sorted(degrees)), tuple(sorted(multiplicity.values()))


def connected_multigraphs(
    max_vertices: int, max_edges: int, min_vertices: int = 2
) -> Iterator[MultiGraph]:
    """
    Yield one representative of every connected loopless multigraph class.

    Candidates are multisets of vertex pairs; isomorphic duplicates are
    removed with networkx.

    Args:
        max_vertices: Largest vertex count
        max_edges: Largest edge count
        min_vertices: Smallest vertex count

    Yields:
        MultiGraph named ``n{n}m{m}-{k}``
    """
    for n in range(min_vertices, max_vertices + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for m in range(n - 1, max_edges + 1):
            buckets: dict[tuple, list[nx.MultiGraph]] = {}
            found = 0
            for combo in itertools.combinations_with_replacement(pairs, m):
                g = MultiGraph.from_pairs(n, combo)
                if not is_connected(g):
                    continue
                nxg = _to_networkx(g)
                bucket = buckets.setdefault(_invariant(g), [])
                if any(nx.is_isomorphic(nxg, other) for other in bucket):
                    continue
                bucket.append(nxg)
                found += 1
                yield g.with_name(f"n{n}m{m}-{found}")
            logger.debug(f"{found} connected multigraph classes with n={n}, m={m}")


def log_uniform_rates(
    ids: Sequence[EdgeId],
    rng: np.random.Generator,
    low: float = RATE_LOW,
    high: float = RATE_HIGH,
) -> dict[EdgeId, float]:
    """Independent log-uniform rates in ``[low, high]``, one per id."""
    exponents = rng.uniform(math.log(low), math.log(high), size=len(ids))
    return {eid: float(math.exp(x)) for eid, x in zip(ids, exponents, strict=True)}
