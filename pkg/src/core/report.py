"""Analysis reports assembling the quantities of one instance."""

import logging
from dataclasses import dataclass, field
from typing import Any

from core.distributions import Instance
from core.exceptions import DistributionError
from core.graph import DEFAULT_BOND_VERTEX_LIMIT, largest_bond
from core.matroid import (
    MATROID_ELEMENT_LIMIT,
    MatroidInstance,
    exact_expected_sam_matroid,
    largest_cocircuit,
    opt_basis,
    rank,
)
from core.montecarlo import DEFAULT_CHUNK_SIZE, MonteCarloEstimate
from core.stochastic import (
    DEFAULT_EXACT_EDGE_LIMIT,
    DEFAULT_JOINT_ATOM_LIMIT,
    adaptive_expected_min,
    enumerated_expected_sam,
    exact_expected_sam,
    exchange_inequality,
    mc_expected_sam,
    opt_tree,
    performance_ratio,
)

logger = logging.getLogger(__name__)

BOUND_TOLERANCE = 1e-9
MC_SIGMAS = 4.0


@dataclass(frozen=True)
class LemmaCheck:
    """Outcome of one per-instance check; ``residual`` is positive on failure."""

    passed: bool
    residual: float

    @staticmethod
    def at_most(value: float, bound: float, slack: float = BOUND_TOLERANCE) -> "LemmaCheck":
        residual = value - bound
        return LemmaCheck(passed=residual <= slack, residual=residual)

    def to_dict(self) -> dict[str, Any]:
        return {"passed": self.passed, "residual": self.residual}


def _checks_dict(checks: dict[str, LemmaCheck]) -> dict[str, Any]:
    return {name: check.to_dict() for name, check in checks.items()}


@dataclass(frozen=True)
class AnalysisReport:
    """Everything ``analyze`` knows about a graph instance."""

    instance: str
    b: int
    bond_witness: list[str]
    e_opt: float
    e_sam_exact: float | None
    e_sam_mc: MonteCarloEstimate | None
    alpha: float
    lemma_checks: dict[str, LemmaCheck] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.lemma_checks.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "instance": self.instance,
            "b": self.b,
            "bond_witness": self.bond_witness,
            "e_opt": self.e_opt,
            "e_sam_exact": self.e_sam_exact,
            "e_sam_mc": self.e_sam_mc.to_dict() if self.e_sam_mc else None,
            "alpha": self.alpha,
            "lemma_checks": _checks_dict(self.lemma_checks),
        }


def _exact_value(inst: Instance, edge_limit: int, atom_limit: int) -> float:
    if inst.is_exponential:
        return exact_expected_sam(inst, edge_limit)
    if inst.is_discrete:
        return enumerated_expected_sam(inst, atom_limit)
    raise DistributionError("exact E[SAM] needs all-exponential or all-discrete weights")


def analyze(
    inst: Instance,
    exact: bool = True,
    mc_samples: int | None = None,
    seed: int = 0,
    edge_limit: int = DEFAULT_EXACT_EDGE_LIMIT,
    vertex_limit: int = DEFAULT_BOND_VERTEX_LIMIT,
    atom_limit: int = DEFAULT_JOINT_ATOM_LIMIT,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> AnalysisReport:
    """
    Analyze a connected instance.

    alpha uses the exact E[SAM] when it was computed, the Monte Carlo estimate
    otherwise. The largest-bond bound is checked only for exponential weights,
    and is taken as max(b, 1) so that a single vertex passes.

    Args:
        inst: Connected instance
        exact: Compute E[SAM] exactly (recursion or enumeration)
        mc_samples: Number of Monte Carlo draws, or None to skip
        seed: Monte Carlo seed

    Returns:
        AnalysisReport
    """
    if not exact and not mc_samples:
        raise ValueError("analyze needs the exact value, a Monte Carlo estimate, or both")
    b, witness = largest_bond(inst.graph, vertex_limit)
    _, e_opt = opt_tree(inst)
    e_sam_exact = _exact_value(inst, edge_limit, atom_limit) if exact else None
    estimate = (
        mc_expected_sam(inst, mc_samples, seed, chunk_size=chunk_size, workers=workers)
        if mc_samples
        else None
    )
    e_sam = e_sam_exact if e_sam_exact is not None else estimate.estimate
    ratio = performance_ratio(e_sam, e_opt)

    checks: dict[str, LemmaCheck] = {}
    if inst.is_exponential:
        slack = BOUND_TOLERANCE
        if e_sam_exact is None and e_opt > 0:
            slack += MC_SIGMAS * estimate.stderr / e_opt
        checks["bond_bound"] = LemmaCheck.at_most(ratio, max(b, 1), slack)
        checks["exchange_inequality"] = LemmaCheck.at_most(
            exchange_inequality(inst, vertex_limit=vertex_limit), 0.0
        )
    report = AnalysisReport(
        instance=inst.name,
        b=b,
        bond_witness=sorted(witness),
        e_opt=e_opt,
        e_sam_exact=e_sam_exact,
        e_sam_mc=estimate,
        alpha=ratio,
        lemma_checks=checks,
    )
    logger.info(f"Analyzed {inst.name or 'instance'}: b={b} alpha={ratio:.6g}")
    return report


@dataclass(frozen=True)
class SimulationReport:
    """Monte Carlo view of an instance, with exact values where they exist."""

    instance: str
    e_opt: float
    e_adaptive: float | None
    e_sam_exact: float | None
    e_sam_mc: MonteCarloEstimate
    alpha: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "instance": self.instance,
            "e_opt": self.e_opt,
            "e_adaptive": self.e_adaptive,
            "e_sam_exact": self.e_sam_exact,
            "e_sam_mc": self.e_sam_mc.to_dict(),
            "alpha": self.alpha,
        }


def simulate(
    inst: Instance,
    mc_samples: int,
    seed: int = 0,
    edge_limit: int = DEFAULT_EXACT_EDGE_LIMIT,
    atom_limit: int = DEFAULT_JOINT_ATOM_LIMIT,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> SimulationReport:
    """
    Estimate E[SAM] for any instance.

    Discrete instances also get the enumerated E[SAM] and the adaptive optimum;
    exponential instances get the exact recursion when it fits the guard.
    alpha is the Monte Carlo estimate over E[OPT].
    """
    _, e_opt = opt_tree(inst)
    estimate = mc_expected_sam(inst, mc_samples, seed, chunk_size=chunk_size, workers=workers)
    e_adaptive = None
    e_sam_exact = None
    if inst.is_discrete:
        e_adaptive = adaptive_expected_min(inst, atom_limit)
        e_sam_exact = enumerated_expected_sam(inst, atom_limit)
    elif inst.is_exponential and inst.graph.edge_count <= edge_limit:
        e_sam_exact = exact_expected_sam(inst, edge_limit)
    return SimulationReport(
        instance=inst.name,
        e_opt=e_opt,
        e_adaptive=e_adaptive,
        e_sam_exact=e_sam_exact,
        e_sam_mc=estimate,
        alpha=performance_ratio(estimate.estimate, e_opt),
    )


@dataclass(frozen=True)
class MatroidReport:
    """Exact analysis of a matroid instance."""

    instance: str
    rank: int
    c_star: int
    e_opt: float
    e_sam_exact: float
    alpha: float
    lemma_checks: dict[str, LemmaCheck] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.lemma_checks.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "instance": self.instance,
            "rank": self.rank,
            "c_star": self.c_star,
            "e_opt": self.e_opt,
            "e_sam_exact": self.e_sam_exact,
            "alpha": self.alpha,
            "lemma_checks": _checks_dict(self.lemma_checks),
        }


def analyze_matroid(
    inst: MatroidInstance, element_limit: int = MATROID_ELEMENT_LIMIT
) -> MatroidReport:
    """Largest cocircuit, E[OPT], exact E[SAM] and the cocircuit bound check."""
    c_star = largest_cocircuit(inst.matroid, element_limit)
    _, e_opt = opt_basis(inst)
    e_sam = exact_expected_sam_matroid(inst, element_limit)
    ratio = performance_ratio(e_sam, e_opt)
    return MatroidReport(
        instance=inst.name,
        rank=rank(inst.matroid),
        c_star=c_star,
        e_opt=e_opt,
        e_sam_exact=e_sam,
        alpha=ratio,
        lemma_checks={"cocircuit_bound": LemmaCheck.at_most(ratio, max(c_star, 1))},
    )
