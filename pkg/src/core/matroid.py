"""
Matroids given by independence oracles.

This module implements:
- Oracles for graphic, uniform and binary (GF(2)-linear) matroids
- Contraction with loop removal, rank and closure
- Enumeration of bases, circuits, cocircuits, flats and hyperplanes
- Greedy minimum-weight bases and the exact expected SAM cost over matroids

Enumerations walk the power set of the ground set and are size-guarded.
"""

import itertools
import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

from core.distributions import Exponential
from core.exceptions import (
    InvalidEdgeSetError,
    InvalidInstanceError,
    InvalidMinorError,
    SizeGuardError,
)
from core.graph import DisjointSet, MultiGraph, TieBreak, tie_key
from core.stochastic import performance_ratio

logger = logging.getLogger(__name__)

ElementId = str
ElementSet = frozenset[str]

MATROID_ELEMENT_LIMIT = 12
AXIOM_ELEMENT_LIMIT = 8


# ============================================================================
# Oracle interface
# ============================================================================


class IMatroidOracle(ABC):
    """Interface for a matroid: a ground set and an independence test."""

    @property
    @abstractmethod
    def ground_set(self) -> tuple[ElementId, ...]:
        """Elements in a fixed order."""

    @abstractmethod
    def is_independent(self, subset: Iterable[ElementId]) -> bool:
        """Independence test for a subset of the ground set."""

    @property
    def name(self) -> str:
        return ""

    @property
    def size(self) -> int:
        return len(self.ground_set)


@dataclass(frozen=True)
class GraphicMatroid(IMatroidOracle):
    """Cycle matroid of a multigraph: independent sets are forests."""

    graph: MultiGraph

    @property
    def ground_set(self) -> tuple[ElementId, ...]:
        return self.graph.edge_ids

    @property
    def name(self) -> str:
        return f"graphic({self.graph.name})" if self.graph.name else "graphic"

    def is_independent(self, subset: Iterable[ElementId]) -> bool:
        dsu = DisjointSet(self.graph.n)
        return all(dsu.union(*self.graph.endpoints(eid)) for eid in subset)


@dataclass(frozen=True)
class UniformMatroid(IMatroidOracle):
    """U_{k,n}: elements ``"0"`` .. ``"n-1"``, independent iff at most ``k`` of them."""

    k: int
    n: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise InvalidInstanceError(
                f"uniform matroid needs 0 <= k <= n, got k={self.k}, n={self.n}"
            )

    @cached_property
    def _elements(self) -> tuple[ElementId, ...]:
        return tuple(str(i) for i in range(self.n))

    @property
    def ground_set(self) -> tuple[ElementId, ...]:
        return self._elements

    @property
    def name(self) -> str:
        return f"U{self.k},{self.n}"

    def is_independent(self, subset: Iterable[ElementId]) -> bool:
        return len(frozenset(subset)) <= self.k


@dataclass(frozen=True)
class BinaryMatroid(IMatroidOracle):
    """
    Column matroid of a 0/1 matrix over GF(2).

    Each column is stored as an integer bitmask; element ``"i"`` is column i.
    """

    columns: tuple[int, ...]
    label: str = field(default="binary", compare=False)

    @staticmethod
    def from_vectors(vectors: Sequence[Sequence[int]], label: str = "binary") -> "BinaryMatroid":
        """Build from column vectors given as 0/1 lists."""
        columns = []
        for vector in vectors:
            mask = 0
            for bit, value in enumerate(vector):
                if value not in (0, 1):
                    raise InvalidInstanceError(f"binary entries must be 0 or 1, got {value!r}")
                mask |= value << bit
            columns.append(mask)
        return BinaryMatroid(tuple(columns), label=label)

    @staticmethod
    def fano() -> "BinaryMatroid":
        """The Fano plane: the seven non-zero vectors of GF(2)^3."""
        return BinaryMatroid(tuple(range(1, 8)), label="fano")

    @cached_property
    def _elements(self) -> tuple[ElementId, ...]:
        return tuple(str(i) for i in range(len(self.columns)))

    @property
    def ground_set(self) -> tuple[ElementId, ...]:
        return self._elements

    @property
    def name(self) -> str:
        return self.label

    def is_independent(self, subset: Iterable[ElementId]) -> bool:
        # Gaussian elimination keyed by leading bit
        pivots: dict[int, int] = {}
        for element in subset:
            vector = self.columns[int(element)]
            while vector:
                top = vector.bit_length() - 1
                if top not in pivots:
                    pivots[top] = vector
                    break
                vector ^= pivots[top]
            else:
                return False
        return True


@dataclass(frozen=True)
class ContractedMatroid(IMatroidOracle):
    """
    The minor ``base / contracted`` with the resulting loops removed.

    ``contracted`` must be independent in ``base``.
    """

    base: IMatroidOracle
    contracted: ElementSet
    elements: tuple[ElementId, ...]

    @property
    def ground_set(self) -> tuple[ElementId, ...]:
        return self.elements

    @property
    def name(self) -> str:
        return f"{self.base.name}/{{{','.join(sorted(self.contracted))}}}"

    def is_independent(self, subset: Iterable[ElementId]) -> bool:
        return self.base.is_independent(frozenset(subset) | self.contracted)


# ============================================================================
# Basic operations
# ============================================================================


def _require_subset(m: IMatroidOracle, s: Iterable[ElementId]) -> ElementSet:
    subset = frozenset(s)
    foreign = subset - frozenset(m.ground_set)
    if foreign:
        raise InvalidEdgeSetError(f"elements {sorted(foreign)} are not in the ground set")
    return subset


def _require_size(m: IMatroidOracle, limit: int, operation: str) -> None:
    if m.size > limit:
        raise SizeGuardError(
            f"{operation} over {m.size} elements exceeds the limit of {limit}"
        )


def is_loop(m: IMatroidOracle, e: ElementId) -> bool:
    return not m.is_independent({e})


def rank(m: IMatroidOracle, s: Iterable[ElementId] | None = None) -> int:
    """Size of a maximal independent subset of ``s`` (the whole ground set by default)."""
    subset = frozenset(m.ground_set) if s is None else _require_subset(m, s)
    grown: set[ElementId] = set()
    for element in m.ground_set:
        if element in subset and m.is_independent(grown | {element}):
            grown.add(element)
    return len(grown)


def contract_element(m: IMatroidOracle, e: ElementId) -> IMatroidOracle:
    """
    Contract ``e`` and drop the elements that become loops.

    Raises:
        InvalidMinorError: if ``e`` is not in the ground set or is a loop
    """
    if e not in m.ground_set:
        raise InvalidMinorError(f"cannot contract unknown element {e!r}")
    if is_loop(m, e):
        raise InvalidMinorError(f"cannot contract loop {e!r}")
    survivors = tuple(x for x in m.ground_set if x != e and m.is_independent({x, e}))
    if isinstance(m, ContractedMatroid):
        return ContractedMatroid(m.base, m.contracted | {e}, survivors)
    return ContractedMatroid(m, frozenset({e}), survivors)


def closure(m: IMatroidOracle, s: Iterable[ElementId]) -> ElementSet:
    """All elements whose addition does not raise the rank of ``s``."""
    subset = _require_subset(m, s)
    r = rank(m, subset)
    return subset | frozenset(x for x in m.ground_set if rank(m, subset | {x}) == r)


def is_flat(m: IMatroidOracle, s: Iterable[ElementId]) -> bool:
    subset = _require_subset(m, s)
    return closure(m, subset) == subset


def _all_subsets(m: IMatroidOracle) -> Iterator[ElementSet]:
    for size in range(m.size + 1):
        for combo in itertools.combinations(m.ground_set, size):
            yield frozenset(combo)


# ============================================================================
# Enumeration
# ============================================================================


def bases(m: IMatroidOracle, element_limit: int = MATROID_ELEMENT_LIMIT) -> list[ElementSet]:
    _require_size(m, element_limit, "basis enumeration")
    r = rank(m)
    return [
        frozenset(combo)
        for combo in itertools.combinations(m.ground_set, r)
        if m.is_independent(combo)
    ]


def circuits(m: IMatroidOracle, element_limit: int = MATROID_ELEMENT_LIMIT) -> list[ElementSet]:
    """Minimal dependent sets, smallest first."""
    _require_size(m, element_limit, "circuit enumeration")
    found = []
    for size in range(1, rank(m) + 2):
        for combo in itertools.combinations(m.ground_set, size):
            subset = frozenset(combo)
            if m.is_independent(subset):
                continue
            if all(m.is_independent(subset - {x}) for x in subset):
                found.append(subset)
    return found


def cocircuits(m: IMatroidOracle, element_limit: int = MATROID_ELEMENT_LIMIT) -> list[ElementSet]:
    """
    Minimal sets meeting every basis, smallest first.

    C is a cocircuit iff removing it lowers the rank and removing any proper
    subset of it does not.
    """
    _require_size(m, element_limit, "cocircuit enumeration")
    ground = frozenset(m.ground_set)
    r = rank(m)
    found = []
    for subset in _all_subsets(m):
        if not subset or rank(m, ground - subset) == r:
            continue
        if all(rank(m, ground - (subset - {x})) == r for x in subset):
            found.append(subset)
    return found


def largest_cocircuit(m: IMatroidOracle, element_limit: int = MATROID_ELEMENT_LIMIT) -> int:
    """c*: the size of a largest cocircuit; 0 for a rank-0 matroid."""
    return max((len(c) for c in cocircuits(m, element_limit)), default=0)


def hyperplanes(m: IMatroidOracle, element_limit: int = MATROID_ELEMENT_LIMIT) -> list[ElementSet]:
    """Flats of rank r(M) - 1."""
    _require_size(m, element_limit, "hyperplane enumeration")
    r = rank(m)
    return [
        subset
        for subset in _all_subsets(m)
        if rank(m, subset) == r - 1 and is_flat(m, subset)
    ]


def fundamental_circuit(
    m: IMatroidOracle, basis: Iterable[ElementId], e: ElementId
) -> ElementSet:
    """
    The unique circuit inside ``basis + e``.

    Raises:
        InvalidEdgeSetError: if ``basis`` is not a basis or ``e`` belongs to it
    """
    base = _require_subset(m, basis)
    _require_subset(m, {e})
    if len(base) != rank(m) or not m.is_independent(base):
        raise InvalidEdgeSetError("fundamental_circuit needs a basis of the matroid")
    if e in base:
        raise InvalidEdgeSetError(f"element {e!r} belongs to the basis")
    return frozenset({e}) | frozenset(x for x in base if m.is_independent((base - {x}) | {e}))


def greedy_min_basis(
    m: IMatroidOracle,
    weights: Mapping[ElementId, float],
    tie_break: TieBreak | None = None,
) -> ElementSet:
    """
    Minimum-weight basis by the greedy algorithm.

    Elements are scanned in (weight, tie_break(id)) order, so the result is
    deterministic for a fixed tie-break.
    """
    for element in m.ground_set:
        if element not in weights:
            raise InvalidInstanceError(f"no weight given for element {element!r}")
        if not math.isfinite(weights[element]):
            raise InvalidInstanceError(f"weight of element {element!r} is not finite")
    key = tie_key(tie_break)
    chosen: set[ElementId] = set()
    for element in sorted(m.ground_set, key=lambda x: (weights[x], key(x))):
        if m.is_independent(chosen | {element}):
            chosen.add(element)
    return frozenset(chosen)


def check_axioms(m: IMatroidOracle, element_limit: int = AXIOM_ELEMENT_LIMIT) -> list[str]:
    """
    Exhaustively check the independence axioms.

    Returns:
        Descriptions of the violations found; empty if ``m`` is a matroid
    """
    _require_size(m, element_limit, "axiom check")
    violations = []
    if not m.is_independent(frozenset()):
        violations.append("empty set is dependent")
    independent = [s for s in _all_subsets(m) if m.is_independent(s)]
    for subset in independent:
        for x in subset:
            if not m.is_independent(subset - {x}):
                violations.append(f"{sorted(subset)} independent but {sorted(subset - {x})} is not")
    by_size: dict[int, list[ElementSet]] = {}
    for subset in independent:
        by_size.setdefault(len(subset), []).append(subset)
    for size, smaller in by_size.items():
        for i_set in smaller:
            for j_set in by_size.get(size + 1, []):
                if not any(m.is_independent(i_set | {x}) for x in j_set - i_set):
                    violations.append(
                        f"exchange fails for {sorted(i_set)} and {sorted(j_set)}"
                    )
    if violations:
        logger.warning(f"{m.name or 'oracle'} violates {len(violations)} matroid axioms")
    return violations


# ============================================================================
# Stochastic matroid instances
# ============================================================================


@dataclass(frozen=True)
class MatroidInstance:
    """A loopless matroid with an exponential rate per element."""

    matroid: IMatroidOracle
    rates: Mapping[ElementId, float]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        missing = [x for x in self.matroid.ground_set if x not in self.rates]
        if missing:
            raise InvalidInstanceError(f"elements {missing} have no rate")
        restricted = {x: Exponential(self.rates[x]).rate for x in self.matroid.ground_set}
        object.__setattr__(self, "rates", MappingProxyType(restricted))
        loops = [x for x in self.matroid.ground_set if is_loop(self.matroid, x)]
        if loops:
            raise InvalidInstanceError(f"matroid instance has loops {loops}")
        if not self.name:
            object.__setattr__(self, "name", self.matroid.name)

    def means(self) -> dict[ElementId, float]:
        return {x: 1.0 / rate for x, rate in self.rates.items()}


def opt_basis(
    inst: MatroidInstance, tie_break: TieBreak | None = None
) -> tuple[ElementSet, float]:
    """Minimum basis of expected weights and its expected cost."""
    means = inst.means()
    basis = greedy_min_basis(inst.matroid, means, tie_break)
    return basis, math.fsum(means[x] for x in basis)


def exact_expected_sam_matroid(
    inst: MatroidInstance, element_limit: int = MATROID_ELEMENT_LIMIT
) -> float:
    """
    Exact E[SAM] over a matroid by the contraction recursion.

    States are the sets of contracted elements; an element is live in a state
    if it is not a loop of the contracted minor.
    """
    m = inst.matroid
    _require_size(m, element_limit, "exact matroid recursion")
    rates = inst.rates
    memo: dict[ElementSet, float] = {}

    def solve(contracted: ElementSet) -> float:
        cached = memo.get(contracted)
        if cached is not None:
            return cached
        live = [
            x for x in m.ground_set if x not in contracted and m.is_independent(contracted | {x})
        ]
        if not live:
            value = 0.0
        else:
            total = math.fsum(rates[x] for x in live)
            value = math.fsum(
                rates[x] / total * (1.0 / rates[x] + solve(contracted | {x})) for x in live
            )
        memo[contracted] = value
        return value

    result = solve(frozenset())
    logger.debug(f"Matroid recursion visited {len(memo)} minors of {inst.name or 'instance'}")
    return result


def alpha_matroid(inst: MatroidInstance, element_limit: int = MATROID_ELEMENT_LIMIT) -> float:
    """E[SAM] / E[OPT] over a matroid instance."""
    _, e_opt = opt_basis(inst)
    return performance_ratio(exact_expected_sam_matroid(inst, element_limit), e_opt)
