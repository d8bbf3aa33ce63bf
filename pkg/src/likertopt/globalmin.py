"""Latin hypercube sampling and derivative-free global minimization over a
box with optional linear constraints.

Minimization runs in two phases: a seeded Latin-hypercube candidate scan,
then coordinate pattern search from the incumbent with step halving,
projecting every probe back onto the feasible set.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleRegionError
from .problem import ValidatedProblem, is_feasible

_REJECTION_LIMIT = 1000


@dataclass(frozen=True)
class SearchBudget:
    scan_points: int
    refine_iters: int
    seed: int

    def __post_init__(self):
        if self.scan_points < 1:
            raise ValueError("scan_points must be >= 1")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be >= 0")


def default_budget(n: int, seed: int) -> SearchBudget:
    return SearchBudget(scan_points=2000 * n, refine_iters=200, seed=seed)


def latin_hypercube(
    n: int, count: int, problem: ValidatedProblem, seed
) -> np.ndarray:
    """``count`` feasible points, one per equal-width stratum per coordinate.

    Points violating a linear constraint are redrawn inside their assigned
    strata; 1000 consecutive failures raise InfeasibleRegionError.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if n != problem.n:
        raise ValueError(f"dimension {n} does not match problem dimension {problem.n}")
    rng = np.random.default_rng(seed)
    width = (problem.upper - problem.lower) / count
    # stratum index per (point, coordinate): a permutation per coordinate
    strata = np.column_stack([rng.permutation(count) for _ in range(n)])
    offsets = rng.random((count, n))
    points = problem.lower + (strata + offsets) * width
    if problem.has_linear_constraints:
        _reject_into_feasibility(problem, points, strata, width, rng)
    return points


def _reject_into_feasibility(problem, points, strata, width, rng) -> None:
    """Redraw constraint-violating points inside their strata; a point whose
    cell keeps failing first swaps one stratum with a random partner (marginal
    stratification survives the swap), then degrades to plain uniform
    rejection (strict stratification and feasibility can be jointly
    unattainable).  1000 consecutive failed draws raise
    InfeasibleRegionError."""
    count, n = points.shape

    def redraw(k):
        if failures[k] >= 40:
            points[k] = problem.lower + rng.random(n) * (problem.upper - problem.lower)
        else:
            points[k] = problem.lower + (strata[k] + rng.random(n)) * width

    pending = deque(range(count))
    failures = np.zeros(count, dtype=int)
    while pending:
        k = pending.popleft()
        if is_feasible(problem, points[k]):
            failures[k] = 0
            continue
        failures[k] += 1
        if failures[k] >= _REJECTION_LIMIT:
            raise InfeasibleRegionError(
                f"could not draw a feasible point after {_REJECTION_LIMIT} attempts"
            )
        if failures[k] % 20 == 0 and failures[k] < 40 and count > 1:
            partner = int(rng.integers(count - 1))
            partner += partner >= k
            coord = int(rng.integers(n))
            strata[k, coord], strata[partner, coord] = (
                strata[partner, coord],
                strata[k, coord],
            )
            redraw(partner)
            pending.append(partner)
        redraw(k)
        pending.append(k)


def _project_segment(
    problem: ValidatedProblem, origin: np.ndarray, target: np.ndarray
) -> np.ndarray:
    """Clip ``target`` to the box, then pull it toward the feasible
    ``origin`` just enough to satisfy the linear constraints."""
    candidate = np.clip(target, problem.lower, problem.upper)
    if not problem.has_linear_constraints:
        return candidate
    if is_feasible(problem, candidate):
        return candidate
    direction = candidate - origin
    t_max = 1.0
    slack = problem.b_vec - problem.a_mat @ origin
    rate = problem.a_mat @ direction
    for s, r in zip(slack, rate):
        if r > 0:
            t_max = min(t_max, s / r)
    t_max = max(t_max, 0.0)
    return origin + t_max * direction


def minimize_acquisition(
    objective,
    problem: ValidatedProblem,
    budget: SearchBudget,
    objective_batch=None,
    extra_candidates=None,
) -> np.ndarray:
    """Two-phase global minimization of ``objective`` over the feasible set.

    ``objective`` maps an original-units point to a value; ``objective_batch``
    may evaluate a (k, n) matrix of points at once for the scan phase.
    ``extra_candidates`` join the scan cloud (callers pass known-interesting
    feasible points; in high dimension the cloud alone cannot see small
    basins).  Deterministic given ``budget.seed``; ties break on
    (value, point).
    """
    candidates = latin_hypercube(problem.n, budget.scan_points, problem, budget.seed)
    if extra_candidates is not None and len(extra_candidates) > 0:
        candidates = np.vstack([candidates, np.atleast_2d(extra_candidates)])
    evaluate = objective_batch or (
        lambda xs: np.array([float(objective(x)) for x in np.atleast_2d(xs)])
    )
    values = np.asarray(evaluate(candidates), dtype=float)
    best_idx = _argmin_lex(values, candidates)
    incumbent = candidates[best_idx].copy()
    if budget.refine_iters == 0:
        return incumbent
    incumbent_value = float(evaluate(incumbent[None, :])[0])

    step = (problem.upper - problem.lower) / 4.0
    for _ in range(budget.refine_iters):
        probes = np.empty((2 * problem.n, problem.n))
        for k in range(problem.n):
            for col, sign in enumerate((1.0, -1.0)):
                probe = incumbent.copy()
                probe[k] += sign * step[k]
                probes[2 * k + col] = _project_segment(problem, incumbent, probe)
        probe_values = np.asarray(evaluate(probes), dtype=float)
        best = _argmin_lex(probe_values, probes)
        if probe_values[best] < incumbent_value:
            incumbent_value = float(probe_values[best])
            incumbent = probes[best].copy()
        else:
            step = step / 2.0
    return incumbent


def _argmin_lex(values: np.ndarray, points: np.ndarray) -> int:
    """Index of the smallest value; exact ties resolved by lexicographically
    smallest point, so parallel scan schedules cannot change the result."""
    vmin = values.min()
    ties = np.flatnonzero(values == vmin)
    if ties.size == 1:
        return int(ties[0])
    tied = points[ties]
    order = np.lexsort(tied.T[::-1])
    return int(ties[order[0]])
