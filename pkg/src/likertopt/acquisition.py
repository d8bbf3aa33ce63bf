"""Acquisition function: normalized surrogate minus inverse-distance
exploration, with an adaptive exploration weight.

The exploration term is zero at already-sampled points, positive elsewhere,
and bounded by pi/2.  The weight resets to 0.2 of its ceiling whenever a
proposal becomes the new best and otherwise grows by 0.1 of the ceiling per
iteration, capped at the ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySampleListError
from .surrogate import SurrogateModel, _sq_distance_matrix, surrogate_eval_many

# Points closer than this (squared distance) to a sample count as that sample.
_COINCIDENCE_SQ = 1e-24

_FLAT_RANGE_GUARD = 1e-9


@dataclass(frozen=True)
class AcquisitionContext:
    model: SurrogateModel
    samples: np.ndarray       # (N, n) scaled
    delta_f: float            # surrogate range over the samples
    alpha: float              # current exploration weight
    alpha_bar: float          # exploration ceiling

    def __post_init__(self):
        if self.delta_f <= 0:
            raise ValueError("delta_f must be positive")
        if not (0.0 <= self.alpha <= self.alpha_bar):
            raise ValueError("alpha must lie in [0, alpha_bar]")


def idw_z(x: np.ndarray, samples: np.ndarray) -> float:
    """Inverse-distance-weighting exploration value at ``x``."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise EmptySampleListError("need at least one sample")
    x = np.asarray(x, dtype=float).reshape(1, -1)
    d2 = _sq_distance_matrix(x, samples)[0]
    if float(d2.min()) <= _COINCIDENCE_SQ:
        return 0.0
    return float(np.arctan(1.0 / np.sum(1.0 / d2)))


def idw_z_many(xs: np.ndarray, samples: np.ndarray) -> np.ndarray:
    """Row-wise :func:`idw_z`."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise EmptySampleListError("need at least one sample")
    d2 = _sq_distance_matrix(np.atleast_2d(xs), samples)
    coincident = d2.min(axis=1) <= _COINCIDENCE_SQ
    safe = np.where(d2 <= _COINCIDENCE_SQ, 1.0, d2)
    z = np.arctan(1.0 / np.sum(1.0 / safe, axis=1))
    z[coincident] = 0.0
    return z


def surrogate_range(model: SurrogateModel, samples: np.ndarray) -> float:
    """Range of the surrogate over the samples; 1 when degenerately flat."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise EmptySampleListError("need at least one sample")
    values = surrogate_eval_many(model, samples)
    rng = float(values.max() - values.min())
    return rng if rng >= _FLAT_RANGE_GUARD else 1.0


def acquisition_eval(ctx: AcquisitionContext, x: np.ndarray) -> float:
    fhat = surrogate_eval_many(ctx.model, np.asarray(x, dtype=float).reshape(1, -1))[0]
    return float(fhat) / ctx.delta_f - ctx.alpha * idw_z(x, ctx.samples)


def acquisition_eval_many(ctx: AcquisitionContext, xs: np.ndarray) -> np.ndarray:
    xs = np.atleast_2d(xs)
    return surrogate_eval_many(ctx.model, xs) / ctx.delta_f - ctx.alpha * idw_z_many(
        xs, ctx.samples
    )


def update_alpha(alpha_n: float, alpha_bar: float, proposal_became_best: bool) -> float:
    """Exploration-weight schedule."""
    if not (0.0 <= alpha_n <= alpha_bar):
        raise ValueError("alpha_n must lie in [0, alpha_bar]")
    if proposal_became_best:
        return 0.2 * alpha_bar
    return min(alpha_n + 0.1 * alpha_bar, alpha_bar)
