"""
Verification suites over exhaustive small-instance families.

Each suite runs a set of named checks, counts passes and tracks the worst
residual (positive means violated). The first failing instance of every
check is kept so the command line can write it out for replay.
"""

import itertools
import logging
import math
import time
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from core.distributions import Discrete, Instance
from core.families import connected_multigraphs, log_uniform_rates
from core.graph import (
    EdgeId,
    MultiGraph,
    all_bonds,
    contract,
    enumerate_spanning_trees,
    fundamental_cycle,
    is_bond,
    kruskal_mst,
    largest_bond,
    tie_order,
    tree_weight,
)
from core.matroid import (
    AXIOM_ELEMENT_LIMIT,
    BinaryMatroid,
    GraphicMatroid,
    IMatroidOracle,
    MatroidInstance,
    UniformMatroid,
    alpha_matroid,
    bases,
    check_axioms,
    cocircuits,
    contract_element,
    exact_expected_sam_matroid,
    fundamental_circuit,
    hyperplanes,
    largest_cocircuit,
    rank,
)
from core.montecarlo import task_rng
from core.stochastic import (
    alpha,
    conditional_expected_sam_mc,
    exact_expected_sam,
    exchange_edge,
    exchange_inequality,
    first_choice_mc,
    first_choice_prob,
    item_selection_expected_sam,
    opt_tree,
)
from utils.helpers import format_duration

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9
EQUALITY_TOLERANCE = 1e-12
MC_SIGMAS = 4.0
TIE_WEIGHTINGS = 3
KRUSKAL_WEIGHT_RANGE = (1, 6)
TIE_WEIGHT_RANGE = (1, 3)
MEMORYLESS_EDGE_LIMIT = 5
UNIFORM_SIZE_LIMIT = 6

Counterexample = Instance | MatroidInstance


@dataclass
class VerifyOptions:
    """Family sizes and sampling effort for the suites."""

    max_edges: int = 6
    max_vertices: int = 5
    trials: int = 100
    seed: int = 0
    mc_samples: int = 2000
    memoryless_max_edges: int = MEMORYLESS_EDGE_LIMIT


@dataclass
class CheckTally:
    """Running result of one named check."""

    name: str
    total: int = 0
    failures: int = 0
    worst_residual: float = -math.inf
    counterexample: Counterexample | None = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(
        self,
        residual: float,
        passed: bool,
        witness: Counterexample,
        detail: str = "",
    ) -> None:
        """Count one case; on the first failure keep ``witness`` for replay."""
        self.total += 1
        self.worst_residual = max(self.worst_residual, residual)
        if passed:
            return
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = witness
            self.detail = detail
            logger.warning(f"Check {self.name} failed: {detail or 'no detail'}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "total": self.total,
            "failures": self.failures,
            "worst_residual": self.worst_residual if self.total else None,
        }


@dataclass
class SuiteResult:
    suite: str
    checks: dict[str, CheckTally] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())

    def first_failure(self) -> CheckTally | None:
        return next((check for check in self.checks.values() if not check.passed), None)

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": {name: check.to_dict() for name, check in self.checks.items()},
        }


def _tallies(suite: str, names: Iterable[str]) -> SuiteResult:
    return SuiteResult(suite, {name: CheckTally(name) for name in names})


def _point_instance(g: MultiGraph, weights: Mapping[EdgeId, float] | None = None) -> Instance:
    weights = weights or {eid: 1.0 for eid in g.edge_ids}
    return Instance(g, {eid: Discrete.point(weights[eid]) for eid in g.edge_ids}, name=g.name)


def _unit_matroid_instance(m: IMatroidOracle) -> MatroidInstance:
    return MatroidInstance(m, {x: 1.0 for x in m.ground_set})


def _integer_weights(ids: Iterable[str], rng: np.random.Generator, bounds: tuple[int, int]):
    return {x: float(rng.integers(*bounds)) for x in ids}


def _peak_pairs(
    minimum: list[frozenset[str]],
    ground: Iterable[str],
    peak: Callable[[frozenset[str], str], float],
) -> Iterable[tuple[str, float, float]]:
    """For two distinct minimum bases and e outside both, the two peak weights."""
    for first, second in itertools.combinations(minimum, 2):
        for e in ground:
            if e not in first and e not in second:
                yield e, peak(first, e), peak(second, e)


# ============================================================================
# Graph suite
# ============================================================================

GRAPH_CHECKS = (
    "contraction_monotone",
    "contraction_preserving",
    "edge_count_bound",
    "tie_invariance",
    "bond_witness",
    "kruskal_optimal",
)


def verify_graphs(options: VerifyOptions) -> SuiteResult:
    """Structural bond and spanning tree facts, exhaustively on small graphs."""
    rng = task_rng(options.seed, 0)
    result = _tallies("graphs", GRAPH_CHECKS)
    checks = result.checks
    for g in connected_multigraphs(options.max_vertices, options.max_edges):
        b, witness = largest_bond(g)
        unit = _point_instance(g)

        ok = is_bond(g, witness)
        checks["bond_witness"].record(0.0 if ok else 1.0, ok, unit, f"{g.name}: witness")
        excess = g.edge_count - b * (g.n - 1)
        checks["edge_count_bound"].record(excess, excess <= 0, unit, f"{g.name}: {excess}")

        for e in g.edge_ids:
            minor, _ = contract(g, e)
            minor_b, _ = largest_bond(minor)
            checks["contraction_monotone"].record(
                minor_b - b, minor_b <= b, unit, f"{g.name}/{e}: {minor_b} > {b}"
            )
            if g.n > 2 and e not in witness:
                checks["contraction_preserving"].record(
                    b - minor_b, minor_b == b, unit, f"{g.name}/{e}: {minor_b} != {b}"
                )

        trees = enumerate_spanning_trees(g)
        weights = _integer_weights(g.edge_ids, rng, KRUSKAL_WEIGHT_RANGE)
        best = min(tree_weight(t, weights) for t in trees)
        gap = tree_weight(kruskal_mst(g, weights), weights) - best
        checks["kruskal_optimal"].record(
            gap,
            gap <= TOLERANCE,
            _point_instance(g, weights),
            f"{g.name}: kruskal exceeds optimum by {gap}",
        )

        for _ in range(TIE_WEIGHTINGS):
            weights = _integer_weights(g.edge_ids, rng, TIE_WEIGHT_RANGE)
            best = min(tree_weight(t, weights) for t in trees)
            minimum = [t for t in trees if tree_weight(t, weights) == best]

            def peak(tree, e, g=g, w=weights):
                return max(w[f] for f in fundamental_cycle(g, tree, e) - {e})

            for e, first, second in _peak_pairs(minimum, g.edge_ids, peak):
                checks["tie_invariance"].record(
                    abs(first - second),
                    first == second,
                    _point_instance(g, weights),
                    f"{g.name}: cycle peaks of {e} differ ({first} vs {second})",
                )
    return result


# ============================================================================
# Stochastic suite
# ============================================================================

STOCHASTIC_CHECKS = (
    "bond_bound",
    "exchange_inequality",
    "exchange_identity",
    "exchange_tie_invariance",
    "first_choice_frequency",
    "item_selection",
    "memoryless_identity",
)


def verify_stochastic(options: VerifyOptions) -> SuiteResult:
    """Bond bound and exact identities on random exponential instances."""
    rng = task_rng(options.seed, 1)
    result = _tallies("stochastic", STOCHASTIC_CHECKS)
    checks = result.checks
    for g in connected_multigraphs(options.max_vertices, options.max_edges):
        b, _ = largest_bond(g)
        for _ in range(options.trials):
            inst = Instance.exponential(g, log_uniform_rates(g.edge_ids, rng), name=g.name)
            rates = inst.rates()

            ratio = alpha(inst)
            checks["bond_bound"].record(
                ratio - b, ratio <= b + TOLERANCE, inst, f"{g.name}: alpha {ratio} > b {b}"
            )
            total = exchange_inequality(inst)
            checks["exchange_inequality"].record(
                total, total <= TOLERANCE, inst, f"{g.name}: sum {total} > 0"
            )

            tree, e_opt = opt_tree(inst)
            for e in g.edge_ids:
                star = exchange_edge(inst, e, tree=tree).edge
                _, minor_opt = opt_tree(inst.contract(e))
                gap = abs(e_opt - 1.0 / rates[star] - minor_opt)
                checks["exchange_identity"].record(
                    gap,
                    gap <= TOLERANCE * max(1.0, e_opt),
                    inst,
                    f"{g.name}/{e}: E[OPT] identity off by {gap}",
                )

            if g.n == 2:
                exact = exact_expected_sam(inst)
                closed = item_selection_expected_sam(rates)
                gap = abs(exact - closed)
                checks["item_selection"].record(
                    gap,
                    gap <= EQUALITY_TOLERANCE * max(1.0, closed),
                    inst,
                    f"{g.name}: recursion {exact} vs closed form {closed}",
                )

        if g.edge_count <= options.memoryless_max_edges:
            _check_memoryless(g, rng, options, checks["memoryless_identity"])
        _check_first_choice(g, rng, options, checks["first_choice_frequency"])
        _check_exchange_ties(g, rng, checks["exchange_tie_invariance"])
    return result


def _check_memoryless(
    g: MultiGraph, rng: np.random.Generator, options: VerifyOptions, tally: CheckTally
) -> None:
    """Conditioning on ``e`` being sampled first equals paying for ``e`` then solving G/e."""
    rates = {eid: float(rng.uniform(0.5, 2.0)) for eid in g.edge_ids}
    inst = Instance.exponential(g, rates, name=g.name)
    for e in g.edge_ids:
        seed = int(rng.integers(2**63))
        estimate = conditional_expected_sam_mc(inst, e, options.mc_samples, seed)
        expected = 1.0 / rates[e] + exact_expected_sam(inst.contract(e))
        gap = abs(estimate.estimate - expected)
        allowed = MC_SIGMAS * estimate.stderr
        tally.record(
            gap - allowed,
            gap <= allowed + TOLERANCE,
            inst,
            f"{g.name}/{e}: estimate {estimate.estimate} vs {expected} (seed {seed})",
        )


def _check_first_choice(
    g: MultiGraph, rng: np.random.Generator, options: VerifyOptions, tally: CheckTally
) -> None:
    """Argmin frequencies of the samples match rate_e / sum of rates."""
    rates = {eid: float(rng.uniform(0.5, 2.0)) for eid in g.edge_ids}
    inst = Instance.exponential(g, rates, name=g.name)
    seed = int(rng.integers(2**63))
    n = options.mc_samples
    for e in g.edge_ids:
        p = first_choice_prob(inst, e)
        estimate = first_choice_mc(inst, e, n, seed)
        gap = abs(estimate.estimate - p)
        # binomial spread of the known probability
        allowed = MC_SIGMAS * math.sqrt(p * (1.0 - p) / n)
        tally.record(
            gap - allowed,
            gap <= allowed + TOLERANCE,
            inst,
            f"{g.name}/{e}: frequency {estimate.estimate} vs {p} (seed {seed})",
        )


def _check_exchange_ties(g: MultiGraph, rng: np.random.Generator, tally: CheckTally) -> None:
    """Mean of e* is the same for optimal trees picked by opposite tie orders."""
    ids = list(g.edge_ids)
    orders = (tie_order(ids), tie_order(ids[::-1]))
    for _ in range(TIE_WEIGHTINGS):
        inst = Instance.exponential(g, _integer_weights(ids, rng, TIE_WEIGHT_RANGE), name=g.name)
        means = inst.means()
        trees = [opt_tree(inst, order)[0] for order in orders]
        for e in ids:
            first, second = (
                means[exchange_edge(inst, e, order, tree).edge]
                for order, tree in zip(orders, trees, strict=True)
            )
            tally.record(
                abs(first - second),
                first == second,
                inst,
                f"{g.name}/{e}: e* means {first} and {second} differ across tie orders",
            )


# ============================================================================
# Matroid suite
# ============================================================================

MATROID_CHECKS = (
    "axioms",
    "cocircuit_bound",
    "cocircuit_contraction",
    "size_bound",
    "circuit_weights",
    "hyperplane_duality",
    "cocircuits_are_bonds",
    "graphic_sam_equality",
)


def registered_matroids(options: VerifyOptions) -> list[IMatroidOracle]:
    """Graphic matroids of the small graph family, uniform matroids and the Fano plane."""
    matroids: list[IMatroidOracle] = [
        GraphicMatroid(g) for g in connected_multigraphs(options.max_vertices, options.max_edges)
    ]
    for n in range(1, min(UNIFORM_SIZE_LIMIT, options.max_edges) + 1):
        matroids.extend(UniformMatroid(k, n) for k in range(1, n + 1))
    matroids.append(BinaryMatroid.fano())
    return matroids


def verify_matroids(options: VerifyOptions) -> SuiteResult:
    """Cocircuit facts and the cocircuit bound on every registered matroid."""
    rng = task_rng(options.seed, 2)
    result = _tallies("matroids", MATROID_CHECKS)
    checks = result.checks
    for m in registered_matroids(options):
        unit = _unit_matroid_instance(m)
        ground = frozenset(m.ground_set)

        if m.size <= AXIOM_ELEMENT_LIMIT:
            violations = check_axioms(m)
            checks["axioms"].record(
                float(len(violations)), not violations, unit, f"{m.name}: {violations[:1]}"
            )

        found = cocircuits(m)
        c_star = max((len(c) for c in found), default=0)
        r = rank(m)
        excess = m.size - r * c_star
        checks["size_bound"].record(excess, excess <= 0, unit, f"{m.name}: {excess}")

        dual = {ground - c for c in found}
        same = set(hyperplanes(m)) == dual
        checks["hyperplane_duality"].record(0.0 if same else 1.0, same, unit, m.name)

        for e in m.ground_set:
            minor_c = largest_cocircuit(contract_element(m, e))
            checks["cocircuit_contraction"].record(
                minor_c - c_star, minor_c <= c_star, unit, f"{m.name}/{e}: {minor_c} > {c_star}"
            )

        all_bases = bases(m)
        for _ in range(TIE_WEIGHTINGS):
            weights = _integer_weights(m.ground_set, rng, TIE_WEIGHT_RANGE)
            best = min(math.fsum(weights[x] for x in basis) for basis in all_bases)
            minimum = [b for b in all_bases if math.fsum(weights[x] for x in b) == best]

            def peak(basis, e, m=m, w=weights):
                return max(w[x] for x in fundamental_circuit(m, basis, e) - {e})

            for e, first, second in _peak_pairs(minimum, m.ground_set, peak):
                checks["circuit_weights"].record(
                    abs(first - second),
                    first == second,
                    MatroidInstance(m, {x: 1.0 / weights[x] for x in weights}),
                    f"{m.name}: circuit peaks of {e} differ ({first} vs {second})",
                )

        if isinstance(m, GraphicMatroid):
            same = set(found) == set(all_bonds(m.graph))
            checks["cocircuits_are_bonds"].record(0.0 if same else 1.0, same, unit, m.name)

        for _ in range(options.trials):
            inst = MatroidInstance(m, log_uniform_rates(m.ground_set, rng))
            ratio = alpha_matroid(inst)
            bound = max(c_star, 1)
            checks["cocircuit_bound"].record(
                ratio - bound,
                ratio <= bound + TOLERANCE,
                inst,
                f"{m.name}: alpha {ratio} > c* {c_star}",
            )
            if isinstance(m, GraphicMatroid):
                via_matroid = exact_expected_sam_matroid(inst)
                via_graph = exact_expected_sam(Instance.exponential(m.graph, inst.rates))
                gap = abs(via_matroid - via_graph)
                checks["graphic_sam_equality"].record(
                    gap,
                    gap <= EQUALITY_TOLERANCE * max(1.0, via_graph),
                    inst,
                    f"{m.name}: {via_matroid} vs {via_graph}",
                )
    return result


# ============================================================================
# Entry point
# ============================================================================

SUITES: dict[str, Callable[[VerifyOptions], SuiteResult]] = {
    "graphs": verify_graphs,
    "stochastic": verify_stochastic,
    "matroids": verify_matroids,
}


def run_suites(names: Iterable[str], options: VerifyOptions) -> list[SuiteResult]:
    """
    Run suites in the given order.

    Args:
        names: Suite names, or ``["all"]``
        options: Family sizes and effort

    Returns:
        One SuiteResult per suite
    """
    names = list(names)
    if names == ["all"]:
        names = list(SUITES)
    results = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}, expected one of {sorted(SUITES)} or 'all'")
        logger.info(f"Running {name} suite with {options}")
        started = time.perf_counter()
        outcome = SUITES[name](options)
        elapsed = format_duration(time.perf_counter() - started)
        logger.info(f"Suite {name} {'passed' if outcome.passed else 'FAILED'} in {elapsed}")
        results.append(outcome)
    return results
