"""
Edge weight distributions and stochastic instances.

An instance is a multigraph plus one independent weight distribution per
edge: exponential rates for the analysis, or finitely many atoms for the
adversary-separation examples.
"""

import math
from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any

import numpy as np

from core.exceptions import DistributionError, InvalidInstanceError
from core.graph import Edge, EdgeId, MultiGraph, contract

PROBABILITY_TOLERANCE = 1e-9


# ============================================================================
# Distributions
# ============================================================================


class WeightDistribution(ABC):
    """Interface for a non-negative edge weight distribution."""

    @abstractmethod
    def mean(self) -> float:
        """Expected weight."""

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` independent weights."""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """Instance-file representation."""


@dataclass(frozen=True)
class Exponential(WeightDistribution):
    """Exponential distribution with rate ``rate`` (mean ``1/rate``)."""

    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise DistributionError(
                f"exponential rate must be positive and finite, got {self.rate}"
            )

    def mean(self) -> float:
        return 1.0 / self.rate

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(scale=1.0 / self.rate, size=size)

    def to_dict(self) -> dict[str, Any]:
        return {"type": "exp", "rate": self.rate}


@dataclass(frozen=True)
class Discrete(WeightDistribution):
    """Finitely many (value, probability) atoms."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple((float(value), float(prob)) for value, prob in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise DistributionError("discrete distribution needs at least one atom")
        for value, prob in atoms:
            if not (math.isfinite(value) and value >= 0):
                raise DistributionError(f"atom value must be finite and non-negative, got {value}")
            if not 0 <= prob <= 1:
                raise DistributionError(f"atom probability must lie in [0, 1], got {prob}")
        total = math.fsum(prob for _, prob in atoms)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise DistributionError(f"atom probabilities sum to {total}, expected 1")

    @staticmethod
    def point(value: float) -> "Discrete":
        """Deterministic weight."""
        return Discrete(atoms=((value, 1.0),))

    def mean(self) -> float:
        return math.fsum(value * prob for value, prob in self.atoms)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        values = np.array([value for value, _ in self.atoms])
        probs = np.array([prob for _, prob in self.atoms])
        return rng.choice(values, size=size, p=probs / probs.sum())

    def to_dict(self) -> dict[str, Any]:
        return {"type": "discrete", "atoms": [[value, prob] for value, prob in self.atoms]}


def mean(d: WeightDistribution) -> float:
    """Expected value of a weight distribution."""
    return d.mean()


# ============================================================================
# Instances
# ============================================================================


@dataclass(frozen=True)
class Instance:
    """A multigraph with one independent weight distribution per edge."""

    graph: MultiGraph
    dist: Mapping[EdgeId, WeightDistribution]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        missing = [eid for eid in self.graph.edge_ids if eid not in self.dist]
        if missing:
            raise InvalidInstanceError(f"edges {missing} have no weight distribution")
        restricted = {eid: self.dist[eid] for eid in self.graph.edge_ids}
        object.__setattr__(self, "dist", MappingProxyType(restricted))
        if not self.name and self.graph.name:
            object.__setattr__(self, "name", self.graph.name)

    @staticmethod
    def exponential(graph: MultiGraph, rates: Mapping[EdgeId, float], name: str = "") -> "Instance":
        """Build an all-exponential instance from a rate vector."""
        return Instance(graph, {eid: Exponential(rates[eid]) for eid in rates}, name=name)

    @property
    def is_exponential(self) -> bool:
        return all(isinstance(d, Exponential) for d in self.dist.values())

    @property
    def is_discrete(self) -> bool:
        return all(isinstance(d, Discrete) for d in self.dist.values())

    def require_exponential(self, operation: str) -> None:
        if not self.is_exponential:
            raise DistributionError(f"{operation} requires exponential weights on every edge")

    def means(self) -> dict[EdgeId, float]:
        return {eid: d.mean() for eid, d in self.dist.items()}

    def rates(self) -> dict[EdgeId, float]:
        """Rate vector of an exponential instance."""
        self.require_exponential("rates")
        return {eid: d.rate for eid, d in self.dist.items()}

    def contract(self, e: EdgeId) -> "Instance":
        """Instance on ``graph / e`` with the distributions restricted to it."""
        minor, _ = contract(self.graph, e)
        return Instance(minor, {eid: self.dist[eid] for eid in minor.edge_ids}, name=self.name)


class InstanceBuilder:
    """Fluent builder for instances."""

    def __init__(self, n: int = 1):
        self._n = n
        self._edges: list[Edge] = []
        self._dist: dict[EdgeId, WeightDistribution] = {}
        self._name = ""

    def with_vertices(self, n: int) -> "InstanceBuilder":
        self._n = n
        return self

    def with_name(self, name: str) -> "InstanceBuilder":
        self._name = name
        return self

    def with_edge(
        self, eid: EdgeId, u: int, v: int, dist: WeightDistribution
    ) -> "InstanceBuilder":
        self._edges.append(Edge(eid, u, v))
        self._dist[eid] = dist
        return self

    def with_exponential_edge(self, eid: EdgeId, u: int, v: int, rate: float) -> "InstanceBuilder":
        return self.with_edge(eid, u, v, Exponential(rate))

    def build(self) -> Instance:
        graph = MultiGraph(n=self._n, edges=tuple(self._edges), name=self._name)
        return Instance(graph, dict(self._dist), name=self._name)


def with_rates(graph: MultiGraph, rates: Iterable[float] | Mapping[EdgeId, float]) -> Instance:
    """Attach rates, given positionally or by edge id, to ``graph``."""
    if not isinstance(rates, Mapping):
        rates = dict(zip(graph.edge_ids, rates, strict=True))
    return Instance.exponential(graph, rates, name=graph.name)
