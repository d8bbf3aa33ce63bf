"""Synthetic decision maker for benchmark runs.

Maps true objective differences to likert answers through a perception
threshold, optionally emits a second adjacent outcome, and tags outcomes
with randomized certainty levels.  The true answer is always a member of
the emitted set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .benchmarks import BenchmarkFunction, eval_benchmark
from .preferences import OutcomeSet, validate_outcome_set

DEFAULT_MULTI_PROB = 0.5
UNIFORM_CERTAINTY = (1.0, 1.0, 1.0, 1.0)

# Adjacent likert value(s) a confused answer may add, per true value.
_NEIGHBORS = {-2: (-1,), -1: (-2, 0), 0: (-1, 1), 1: (0, 2), 2: (1,)}


@dataclass(frozen=True)
class OracleConfig:
    sigma: float
    multi_prob: float = DEFAULT_MULTI_PROB
    certainty_dist: tuple[float, float, float, float] = UNIFORM_CERTAINTY
    seed: int = 0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not (0.0 <= self.multi_prob <= 1.0):
            raise ValueError("multi_prob must lie in [0, 1]")
        if len(self.certainty_dist) != 4 or any(w < 0 for w in self.certainty_dist):
            raise ValueError("certainty_dist needs 4 nonnegative weights")


def true_likert(f1: float, f2: float, sigma: float) -> int:
    """Likert answer implied by the true objective values.

    Zero only on exact equality; the threshold separates "slightly" from
    "much" better.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if f1 == f2:
        return 0
    if f1 < f2:
        return -2 if f1 < f2 - sigma else -1
    return 2 if f1 > f2 + sigma else 1


def _draw_certainty(rng: np.random.Generator, weights, allowed: tuple[int, ...]) -> int:
    w = np.array([weights[level - 1] for level in allowed], dtype=float)
    w = w / w.sum()
    return int(rng.choice(allowed, p=w))


def emit_outcome_set(
    p_true: int, cfg: OracleConfig, rng: np.random.Generator
) -> OutcomeSet:
    """Randomized answer containing ``p_true``.

    With probability ``multi_prob`` a sign-consistent adjacent value joins
    the answer (both then drawn from certainties 1..3); otherwise the single
    true value carries a certainty from 1..4.
    """
    if rng.random() < cfg.multi_prob:
        neighbors = _NEIGHBORS[p_true]
        neighbor = neighbors[0] if len(neighbors) == 1 else int(
            neighbors[int(rng.integers(0, 2))]
        )
        pair = sorted([p_true, neighbor])
        outcomes = [
            (p, _draw_certainty(rng, cfg.certainty_dist, (1, 2, 3))) for p in pair
        ]
        return validate_outcome_set(outcomes)
    c = _draw_certainty(rng, cfg.certainty_dist, (1, 2, 3, 4))
    return validate_outcome_set([(p_true, c)])


@dataclass
class SyntheticDecisionMaker:
    """Callable oracle answering preference queries for a benchmark.

    Exposes the true objective and its optimum so harness code can log
    ground-truth gaps.
    """

    fn: BenchmarkFunction
    cfg: OracleConfig
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self._rng = np.random.default_rng(self.cfg.seed)

    def __call__(self, x_a: np.ndarray, x_b: np.ndarray) -> OutcomeSet:
        p = true_likert(self.true_f(x_a), self.true_f(x_b), self.cfg.sigma)
        return emit_outcome_set(p, self.cfg, self._rng)

    def true_f(self, x: np.ndarray) -> float:
        return eval_benchmark(self.fn, x)

    @property
    def optimum_value(self) -> float:
        return self.fn.optimum_value


def make_query_oracle(fn: BenchmarkFunction, cfg: OracleConfig) -> SyntheticDecisionMaker:
    return SyntheticDecisionMaker(fn=fn, cfg=cfg)


def default_oracle_sigma(fn: BenchmarkFunction, draws: int = 1000, seed: int = 0) -> float:
    """Range-relative perception threshold: 10% of the objective spread over
    seeded uniform box samples."""
    rng = np.random.default_rng(seed)
    lower = np.asarray(fn.lower)
    upper = np.asarray(fn.upper)
    xs = lower + rng.random((draws, fn.n)) * (upper - lower)
    values = np.array([fn.evaluator(x) for x in xs])
    return 0.1 * float(values.max() - values.min())
