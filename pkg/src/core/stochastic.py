"""
The single-sample model.

SAM runs Kruskal's algorithm on one sampled weight per edge and pays the
true weights; OPT is the minimum spanning tree of expected weights. For
exponential weights the expected cost of SAM follows the recursion over
contraction minors

    E[SAM(G)] = sum_e (rate_e / total) * (1/rate_e + E[SAM(G/e)]),

because the first edge SAM picks is the minimum sample and the remaining
samples are memoryless.
"""

import itertools
import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from core.distributions import Discrete, Exponential, Instance
from core.exceptions import (
    DisconnectedGraphError,
    DistributionError,
    InvalidInstanceError,
    SizeGuardError,
)
from core.graph import (
    DEFAULT_BOND_VERTEX_LIMIT,
    DisjointSet,
    EdgeId,
    MultiGraph,
    SpanningTree,
    TieBreak,
    fundamental_cycle,
    is_connected,
    kruskal_mst,
    largest_bond,
    tie_key,
    tree_weight,
)
from core.montecarlo import DEFAULT_CHUNK_SIZE, MonteCarloEstimate, run_tasks

logger = logging.getLogger(__name__)

DEFAULT_EXACT_EDGE_LIMIT = 12
DEFAULT_JOINT_ATOM_LIMIT = 100_000
MAX_REJECTIONS_PER_SAMPLE = 100_000


# ============================================================================
# Trees chosen by OPT and SAM
# ============================================================================


def _require_connected(inst: Instance, operation: str) -> None:
    if not is_connected(inst.graph):
        raise DisconnectedGraphError(f"{operation} requires a connected graph")


def opt_tree(inst: Instance, tie_break: TieBreak | None = None) -> tuple[SpanningTree, float]:
    """
    Non-adaptive optimum: the minimum spanning tree of expected weights.

    Returns:
        Tuple of (tree, expected cost of the tree)
    """
    means = inst.means()
    tree = kruskal_mst(inst.graph, means, tie_break)
    return tree, tree_weight(tree, means)


def sam_tree(
    inst: Instance, samples: Mapping[EdgeId, float], tie_break: TieBreak | None = None
) -> SpanningTree:
    """Tree SAM picks for the given samples."""
    missing = [eid for eid in inst.graph.edge_ids if eid not in samples]
    if missing:
        raise InvalidInstanceError(f"missing samples for edges {missing}")
    return kruskal_mst(inst.graph, samples, tie_break)


def first_choice_prob(inst: Instance, e: EdgeId) -> float:
    """Probability that ``e`` has the smallest sample: rate_e / sum of rates."""
    inst.require_exponential("first_choice_prob")
    inst.graph.edge(e)
    rates = inst.rates()
    return rates[e] / math.fsum(rates.values())


# ============================================================================
# Exact expectations
# ============================================================================


def _merge(labels: tuple[int, ...], a: int, b: int) -> tuple[int, ...]:
    keep, drop = min(a, b), max(a, b)
    return tuple(keep if label == drop else label for label in labels)


def exact_expected_sam(inst: Instance, edge_limit: int = DEFAULT_EXACT_EDGE_LIMIT) -> float:
    """
    Exact E[SAM] for exponential weights by memoized contraction recursion.

    A contraction minor is identified by the vertex partition its contracted
    edges induce; each vertex carries the smallest vertex of its block. Edges
    whose endpoints share a block are the deleted loops.

    Args:
        inst: Connected exponential instance
        edge_limit: Size guard on the number of edges

    Returns:
        Expected true weight of the tree SAM picks
    """
    inst.require_exponential("exact_expected_sam")
    _require_connected(inst, "exact_expected_sam")
    graph = inst.graph
    if graph.edge_count > edge_limit:
        raise SizeGuardError(
            f"exact recursion over {graph.edge_count} edges exceeds the limit of {edge_limit}"
        )
    rates = inst.rates()
    memo: dict[tuple[int, ...], float] = {}

    def solve(labels: tuple[int, ...]) -> float:
        cached = memo.get(labels)
        if cached is not None:
            return cached
        live = [edge for edge in graph.edges if labels[edge.u] != labels[edge.v]]
        if not live:
            value = 0.0
        else:
            total = math.fsum(rates[edge.id] for edge in live)
            value = math.fsum(
                rates[edge.id]
                / total
                * (1.0 / rates[edge.id] + solve(_merge(labels, labels[edge.u], labels[edge.v])))
                for edge in live
            )
        memo[labels] = value
        return value

    result = solve(tuple(range(graph.n)))
    logger.debug(f"Exact recursion visited {len(memo)} minors of {inst.name or 'instance'}")
    return result


def _joint_outcomes(
    inst: Instance, atom_limit: int
) -> Iterator[tuple[dict[EdgeId, float], float]]:
    ids = inst.graph.edge_ids
    atom_lists = [inst.dist[eid].atoms for eid in ids]
    count = math.prod(len(atoms) for atoms in atom_lists)
    if count > atom_limit:
        raise SizeGuardError(f"{count} joint outcomes exceed the limit of {atom_limit}")
    for combo in itertools.product(*atom_lists):
        weights = {eid: value for eid, (value, _) in zip(ids, combo, strict=True)}
        yield weights, math.prod(prob for _, prob in combo)


def enumerated_expected_sam(
    inst: Instance,
    atom_limit: int = DEFAULT_JOINT_ATOM_LIMIT,
    tie_break: TieBreak | None = None,
) -> float:
    """
    Exact E[SAM] for discrete weights by enumerating joint sample outcomes.

    True weights are independent of the samples, so the cost of the chosen
    tree given the samples is the sum of its means.
    """
    if not inst.is_discrete:
        raise DistributionError("enumerated_expected_sam requires discrete weights on every edge")
    _require_connected(inst, "enumerated_expected_sam")
    means = inst.means()
    return math.fsum(
        prob * tree_weight(kruskal_mst(inst.graph, samples, tie_break), means)
        for samples, prob in _joint_outcomes(inst, atom_limit)
        if prob > 0
    )


def adaptive_expected_min(inst: Instance, atom_limit: int = DEFAULT_JOINT_ATOM_LIMIT) -> float:
    """Adaptive optimum E[min_T w(T)] for discrete weights, by enumeration."""
    if not inst.is_discrete:
        raise DistributionError("adaptive_expected_min requires discrete weights on every edge")
    _require_connected(inst, "adaptive_expected_min")
    return math.fsum(
        prob * tree_weight(kruskal_mst(inst.graph, weights), weights)
        for weights, prob in _joint_outcomes(inst, atom_limit)
        if prob > 0
    )


# ============================================================================
# Monte Carlo
# ============================================================================


def _draw_matrix(inst: Instance, rng: np.random.Generator, count: int) -> np.ndarray:
    ids = inst.graph.edge_ids
    if not ids:
        return np.zeros((count, 0))
    return np.column_stack([inst.dist[eid].sample(rng, count) for eid in ids])


def sam_costs(
    graph: MultiGraph,
    samples: np.ndarray,
    weights: np.ndarray,
    tie_break: TieBreak | None = None,
) -> np.ndarray:
    """
    True cost of SAM's tree for each row of a sample matrix.

    Columns follow ``graph.edge_ids``. The tree only depends on the sample
    ranking, so Kruskal runs once per distinct ranking.
    """
    count, m = samples.shape
    if m == 0:
        return np.zeros(count)
    ids = graph.edge_ids
    key = tie_key(tie_break)
    by_tie = np.array(sorted(range(m), key=lambda i: key(ids[i])), dtype=int)
    orders = by_tie[np.argsort(samples[:, by_tie], axis=1, kind="stable")]
    unique, inverse = np.unique(orders, axis=0, return_inverse=True)

    endpoints = [(edge.u, edge.v) for edge in graph.edges]
    masks = np.zeros((len(unique), m), dtype=bool)
    for row, order in enumerate(unique):
        dsu = DisjointSet(graph.n)
        for i in order:
            if dsu.union(*endpoints[i]):
                masks[row, i] = True
    return (weights * masks[inverse.reshape(-1)]).sum(axis=1)


def mc_expected_sam(
    inst: Instance,
    n: int,
    seed: int,
    tie_break: TieBreak | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> MonteCarloEstimate:
    """
    Monte Carlo estimate of E[SAM].

    Each draw samples the single sample and the true weights independently
    and records the true weight of the tree chosen on the sample.
    """
    _require_connected(inst, "mc_expected_sam")

    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        samples = _draw_matrix(inst, rng, count)
        weights = _draw_matrix(inst, rng, count)
        return sam_costs(inst.graph, samples, weights, tie_break)

    estimate = run_tasks(draw, n, seed, chunk_size=chunk_size, workers=workers)
    logger.info(
        f"MC E[SAM] of {inst.name or 'instance'}: {estimate.estimate:.6g} "
        f"+/- {estimate.stderr:.3g} ({n} draws, seed {seed})"
    )
    return estimate


def conditional_expected_sam_mc(
    inst: Instance,
    e: EdgeId,
    n: int,
    seed: int,
    tie_break: TieBreak | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> MonteCarloEstimate:
    """
    Monte Carlo estimate of E[SAM | e has the strictly smallest sample].

    Samples are drawn by rejection until ``e`` is the strict minimum; the tree
    SAM picks on an accepted sample is then charged fresh true weights.
    """
    inst.require_exponential("conditional_expected_sam_mc")
    _require_connected(inst, "conditional_expected_sam_mc")
    column = list(inst.graph.edge_ids).index(inst.graph.edge(e).id)

    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        accepted = []
        found = 0
        drawn = 0
        while found < count:
            batch = _draw_matrix(inst, rng, count)
            drawn += count
            others = np.delete(batch, column, axis=1)
            if others.shape[1]:
                batch = batch[batch[:, column] < others.min(axis=1)]
            accepted.append(batch)
            found += len(batch)
            if found < count and drawn > MAX_REJECTIONS_PER_SAMPLE * count:
                raise SizeGuardError(
                    f"rejection sampling for edge {e!r} accepted {found} of {drawn} draws"
                )
        samples = np.concatenate(accepted)[:count]
        weights = _draw_matrix(inst, rng, count)
        return sam_costs(inst.graph, samples, weights, tie_break)

    return run_tasks(draw, n, seed, chunk_size=chunk_size, workers=workers)


def first_choice_mc(
    inst: Instance,
    e: EdgeId,
    n: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Monte Carlo frequency of ``e`` holding the smallest sample."""
    inst.require_exponential("first_choice_mc")
    column = list(inst.graph.edge_ids).index(inst.graph.edge(e).id)

    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        samples = _draw_matrix(inst, rng, count)
        return (np.argmin(samples, axis=1) == column).astype(float)

    return run_tasks(draw, n, seed, chunk_size=chunk_size, workers=workers)


# ============================================================================
# Exchange edges and the per-instance inequality
# ============================================================================


@dataclass(frozen=True)
class ExchangeEdge:
    """The exchange edge e* of ``e`` with respect to an optimal tree."""

    edge: EdgeId
    in_optimum: bool
    unique_maximum: bool


def exchange_edge(
    inst: Instance,
    e: EdgeId,
    tie_break: TieBreak | None = None,
    tree: SpanningTree | None = None,
) -> ExchangeEdge:
    """
    Find e* for edge ``e``.

    If ``e`` is in the optimal tree, e* is ``e``. Otherwise e* is the edge of
    largest mean on the fundamental cycle of ``e`` other than ``e``, ties by
    ``tie_break``. ``unique_maximum`` is False when ``e`` ties with e* on mean.
    """
    inst.graph.edge(e)
    if tree is None:
        tree, _ = opt_tree(inst, tie_break)
    if e in tree:
        return ExchangeEdge(e, in_optimum=True, unique_maximum=True)

    means = inst.means()
    key = tie_key(tie_break)
    others = fundamental_cycle(inst.graph, tree, e) - {e}
    best = min(others, key=lambda f: (-means[f], key(f)))
    unique = all(means[e] > means[f] for f in others)
    if not unique:
        logger.warning(f"Edge {e} ties with {best} as heaviest mean on its fundamental cycle")
    return ExchangeEdge(best, in_optimum=False, unique_maximum=unique)


def e_star(inst: Instance, e: EdgeId, tie_break: TieBreak | None = None) -> EdgeId:
    """Exchange edge of ``e``; see :func:`exchange_edge`."""
    return exchange_edge(inst, e, tie_break).edge


def exchange_inequality(
    inst: Instance,
    tie_break: TieBreak | None = None,
    vertex_limit: int = DEFAULT_BOND_VERTEX_LIMIT,
) -> float:
    """
    Sum over edges of 1/b - rate_e / rate_{e*}; never positive.
    """
    inst.require_exponential("exchange_inequality")
    _require_connected(inst, "exchange_inequality")
    if inst.graph.edge_count == 0:
        return 0.0
    b, _ = largest_bond(inst.graph, vertex_limit)
    tree, _ = opt_tree(inst, tie_break)
    rates = inst.rates()
    return math.fsum(
        1.0 / b - rates[e] / rates[exchange_edge(inst, e, tie_break, tree).edge]
        for e in inst.graph.edge_ids
    )


# ============================================================================
# Performance ratio
# ============================================================================


def performance_ratio(e_sam: float, e_opt: float) -> float:
    """E[SAM] / E[OPT]; 1 when both are zero (empty tree)."""
    if e_opt == 0:
        return 1.0 if e_sam == 0 else math.inf
    return e_sam / e_opt


def alpha(
    inst: Instance,
    mode: str = "exact",
    n_samples: int = 100_000,
    seed: int = 0,
    edge_limit: int = DEFAULT_EXACT_EDGE_LIMIT,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> float:
    """
    Relative performance E[SAM] / E[OPT] of SAM on an exponential instance.

    Args:
        inst: Connected exponential instance
        mode: "exact" for the recursion, "mc" for a Monte Carlo estimate
        n_samples: Draws in "mc" mode
        seed: Seed in "mc" mode

    Returns:
        The ratio
    """
    inst.require_exponential("alpha")
    _, e_opt = opt_tree(inst)
    if mode == "exact":
        e_sam = exact_expected_sam(inst, edge_limit)
    elif mode == "mc":
        e_sam = mc_expected_sam(
            inst, n_samples, seed, chunk_size=chunk_size, workers=workers
        ).estimate
    else:
        raise ValueError(f"unknown alpha mode {mode!r}, expected 'exact' or 'mc'")
    return performance_ratio(e_sam, e_opt)


# ============================================================================
# Item selection: the two-vertex case
# ============================================================================


def _item_rates(rates: Sequence[float] | Mapping[str, float]) -> list[float]:
    values = list(rates.values()) if isinstance(rates, Mapping) else list(rates)
    if not values:
        raise InvalidInstanceError("item selection needs at least one item")
    return [Exponential(rate).rate for rate in values]


def item_selection_expected_sam(rates: Sequence[float] | Mapping[str, float]) -> float:
    """Expected cost of picking the item with the smallest sample: m / sum of rates."""
    values = _item_rates(rates)
    return len(values) / math.fsum(values)


def item_selection_opt(rates: Sequence[float] | Mapping[str, float]) -> float:
    """Expected cost of the item with the smallest mean."""
    return 1.0 / max(_item_rates(rates))


def item_selection_alpha(rates: Sequence[float] | Mapping[str, float]) -> float:
    return item_selection_expected_sam(rates) / item_selection_opt(rates)


# ============================================================================
# Adversary-separation examples
# ============================================================================


def misleading_sample_instance(m: float) -> Instance:
    """
    Two parallel edges: weight 1, and weight 0 w.p. 1-1/M or M^2 w.p. 1/M.

    The sample points at the risky edge with probability 1-1/M although its
    mean is M.
    """
    if m <= 1:
        raise InvalidInstanceError(f"scale must exceed 1, got {m}")
    graph = MultiGraph.from_pairs(2, [(0, 1), (0, 1)], name=f"misleading-M{m:g}")
    dist = {
        "e1": Discrete.point(1.0),
        "e2": Discrete(((0.0, 1.0 - 1.0 / m), (float(m) ** 2, 1.0 / m))),
    }
    return Instance(graph, dist)


def symmetric_sample_instance(m: float) -> Instance:
    """Two parallel edges: weight 1, and weight 0 or M with probability 1/2 each."""
    if m <= 2:
        raise InvalidInstanceError(f"scale must exceed 2, got {m}")
    graph = MultiGraph.from_pairs(2, [(0, 1), (0, 1)], name=f"symmetric-M{m:g}")
    dist = {"e1": Discrete.point(1.0), "e2": Discrete(((0.0, 0.5), (float(m), 0.5)))}
    return Instance(graph, dist)
