"""
Reproducible, partition-independent Monte Carlo accumulation.

Draws are split into fixed-size tasks. Task ``i`` owns the random stream
``SeedSequence(seed, spawn_key=(i,))`` and returns per-draw values; task
moments are merged in task order with the pairwise update, so results depend
only on (seed, n, chunk_size), never on the number of workers.
"""

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 10_000
MAX_SEED = 2**64 - 1

TaskFn = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Sample mean with its standard error."""

    estimate: float
    stderr: float
    n_samples: int
    seed: int

    def within(self, value: float, sigmas: float) -> bool:
        """True if ``value`` lies within ``sigmas`` standard errors."""
        return abs(self.estimate - value) <= sigmas * self.stderr

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class RunningMoments:
    """Count, mean and sum of squared deviations of a sample."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @staticmethod
    def of(values: np.ndarray) -> "RunningMoments":
        if values.size == 0:
            return RunningMoments()
        mu = float(values.mean())
        return RunningMoments(int(values.size), mu, float(((values - mu) ** 2).sum()))

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        count = self.count + other.count
        delta = other.mean - self.mean
        mu = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / count
        return RunningMoments(count, mu, m2)

    @property
    def stderr(self) -> float:
        """Sample standard deviation over sqrt(count); 0 for fewer than two draws."""
        if self.count < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.count - 1)) / math.sqrt(self.count)


def task_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for task ``index`` under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def validate_seed(seed: int) -> int:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def run_tasks(
    draw: TaskFn,
    n: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> MonteCarloEstimate:
    """
    Run ``n`` draws split into tasks of ``chunk_size`` and merge their moments.

    Args:
        draw: Function (rng, count) -> array of ``count`` per-draw values
        n: Total number of draws, at least 1
        seed: Unsigned 64-bit seed
        chunk_size: Draws per task
        workers: Thread count; does not affect the result

    Returns:
        MonteCarloEstimate over all draws
    """
    if n < 1:
        raise ValueError(f"number of draws must be at least 1, got {n}")
    if chunk_size < 1:
        raise ValueError(f"chunk size must be at least 1, got {chunk_size}")
    validate_seed(seed)

    sizes = [min(chunk_size, n - start) for start in range(0, n, chunk_size)]

    def run(index: int) -> RunningMoments:
        values = np.asarray(draw(task_rng(seed, index), sizes[index]), dtype=float)
        return RunningMoments.of(values)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(index) for index in range(len(sizes))]

    total = RunningMoments()
    for part in parts:
        total = total.merge(part)
    logger.debug(f"Merged {len(parts)} tasks, {total.count} draws, seed {seed}")
    return MonteCarloEstimate(total.mean, total.stderr, total.count, seed)
