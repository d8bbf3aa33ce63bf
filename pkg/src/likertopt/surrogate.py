"""Preference-fitted radial basis function surrogate.

The surrogate is a weighted sum of inverse-quadratic RBFs centered at the
sampled points (in scaled coordinates).  Its weights are the minimizer of a
convex QP whose constraints force each recorded comparison's surrogate
difference into the band matching the answered likert levels, softened by
nonnegative slack variables penalized proportionally to certainty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadTolerancesError,
    DimensionMismatchError,
    EmptyGridError,
    IndexOutOfRangeError,
)
from .preferences import PreferenceRecord, bounds_for_level, record_weights
from .qp import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    QuadraticProgram,
    solve_qp,
)

RBF_INVERSE_QUADRATIC = "inverse_quadratic"

DEFAULT_GAMMA = 1.0
# Flatter candidates cannot separate nearby samples under the squared-norm
# radial argument, so the grid starts at 0.5.
DEFAULT_GAMMA_GRID = (0.5, 1.0, 2.0, 5.0, 10.0)
DEFAULT_CV_FOLDS = 5


@dataclass(frozen=True)
class SurrogateModel:
    """Fitted RBF expansion: centers (scaled), weights, shape parameter."""

    centers: np.ndarray  # (N, n)
    beta: np.ndarray     # (N,)
    gamma: float
    kind: str = RBF_INVERSE_QUADRATIC

    def __post_init__(self):
        if self.centers.shape[0] < 1:
            raise ValueError("need at least one center")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if not np.isfinite(self.beta).all():
            raise ValueError("weights must be finite")


@dataclass(frozen=True)
class FitReport:
    slack0: np.ndarray            # per-record whole-set slack
    slacks: tuple[np.ndarray, ...]  # per-record per-outcome slacks (empty if q=1)
    objective_value: float
    max_slack: float


@dataclass(frozen=True)
class QPOptions:
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER


def sq_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Squared Euclidean distance (the radial argument used throughout)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"dimensions differ: {x.shape} vs {y.shape}")
    d = x - y
    return float(d @ d)


def rbf_inverse_quadratic(gamma: float, r) -> float | np.ndarray:
    """Inverse-quadratic basis ``1 / (1 + (gamma*r)^2)``; r >= 0."""
    v = gamma * np.asarray(r, dtype=float)
    out = 1.0 / (1.0 + v * v)
    return float(out) if out.ndim == 0 else out


def _sq_distance_matrix(xs: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Pairwise squared distances between rows of ``xs`` and ``centers``."""
    xs = np.atleast_2d(xs)
    centers = np.atleast_2d(centers)
    d2 = (
        np.sum(xs * xs, axis=1)[:, None]
        + np.sum(centers * centers, axis=1)[None, :]
        - 2.0 * xs @ centers.T
    )
    return np.maximum(d2, 0.0)


def rbf_matrix(xs: np.ndarray, centers: np.ndarray, gamma: float) -> np.ndarray:
    """RBF values of every row of ``xs`` against every center."""
    return rbf_inverse_quadratic(gamma, _sq_distance_matrix(xs, centers))


def surrogate_eval(model: SurrogateModel, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != model.centers.shape[1]:
        raise DimensionMismatchError(
            f"point has dimension {x.shape[0]}, centers {model.centers.shape[1]}"
        )
    phi = rbf_matrix(x[None, :], model.centers, model.gamma)[0]
    return float(phi @ model.beta)


def surrogate_eval_many(model: SurrogateModel, xs: np.ndarray) -> np.ndarray:
    return rbf_matrix(xs, model.centers, model.gamma) @ model.beta


def assemble_qp(
    samples: np.ndarray,
    records: list[PreferenceRecord],
    sigma1: float,
    sigma2: float,
    lam: float = 1.0,
    gamma: float = DEFAULT_GAMMA,
) -> QuadraticProgram:
    """Build the surrogate-fitting QP.

    Decision vector: the N RBF weights, then per record its whole-set slack,
    then (only for multi-outcome records) one slack per outcome.  Constraint
    rows: the finite sides of the whole-set band relaxed by the whole-set
    slack, the finite sides of each per-outcome band relaxed by that
    outcome's slack, and slack nonnegativity.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    n_samples = samples.shape[0]
    if not (sigma1 > 0 and sigma2 > sigma1):
        raise BadTolerancesError(f"need 0 < sigma1 < sigma2, got {sigma1}, {sigma2}")
    if lam <= 0:
        raise BadTolerancesError(f"ridge weight must be positive, got {lam}")

    phi = rbf_matrix(samples, samples, gamma)

    # variable layout
    slack_pos: list[tuple[int, list[int]]] = []  # per record: (eps0, [eps_t...])
    cursor = n_samples
    for rec in records:
        if not (0 <= rec.i < n_samples and 0 <= rec.j < n_samples):
            raise IndexOutOfRangeError(
                f"record ({rec.i},{rec.j}) outside 0..{n_samples - 1}"
            )
        eps0 = cursor
        cursor += 1
        if rec.outcome_set.q >= 2:
            per = list(range(cursor, cursor + rec.outcome_set.q))
            cursor += rec.outcome_set.q
        else:
            per = []
        slack_pos.append((eps0, per))
    n_z = cursor

    rows: list[np.ndarray] = []
    rhs: list[float] = []

    def band_rows(diff_row: np.ndarray, p_low: int, p_high: int, slack: int) -> None:
        low = bounds_for_level(p_low, sigma1, sigma2)
        high = bounds_for_level(p_high, sigma1, sigma2)
        if low.slack_sign_lower != 0:
            row = np.zeros(n_z)
            row[:n_samples] = -diff_row
            row[slack] = -1.0
            rows.append(row)
            rhs.append(-low.lower)
        if high.slack_sign_upper != 0:
            row = np.zeros(n_z)
            row[:n_samples] = diff_row
            row[slack] = -1.0
            rows.append(row)
            rhs.append(high.upper)

    for rec, (eps0, per) in zip(records, slack_pos):
        diff = phi[rec.i] - phi[rec.j]
        os = rec.outcome_set
        band_rows(diff, os.p_min, os.p_max, eps0)
        for t, outcome in enumerate(os.outcomes):
            if per:
                band_rows(diff, outcome.p, outcome.p, per[t])

    for eps0, per in slack_pos:
        for pos in [eps0] + per:
            row = np.zeros(n_z)
            row[pos] = -1.0
            rows.append(row)
            rhs.append(0.0)

    q_diag = np.zeros(n_z)
    q_diag[:n_samples] = lam
    c = np.zeros(n_z)
    for rec, (eps0, per) in zip(records, slack_pos):
        b_h, w = record_weights(rec.outcome_set)
        c[eps0] = b_h
        for t, pos in enumerate(per):
            c[pos] = w[t]

    a_mat = np.array(rows) if rows else np.zeros((0, n_z))
    b_vec = np.array(rhs) if rhs else np.zeros(0)
    return QuadraticProgram(q_diag, c, a_mat, b_vec)


def fit_surrogate(
    samples: np.ndarray,
    records: list[PreferenceRecord],
    sigma1: float,
    sigma2: float,
    lam: float = 1.0,
    gamma: float = DEFAULT_GAMMA,
    qp_options: QPOptions | None = None,
) -> tuple[SurrogateModel, FitReport]:
    """Fit the surrogate weights by solving the assembled QP."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    opts = qp_options or QPOptions()
    qp = assemble_qp(samples, records, sigma1, sigma2, lam, gamma)
    sol = solve_qp(qp, tol=opts.tol, max_iter=opts.max_iter)
    n_samples = samples.shape[0]
    beta = sol.z[:n_samples].copy()
    slack0 = np.zeros(len(records))
    slacks: list[np.ndarray] = []
    cursor = n_samples
    for k, rec in enumerate(records):
        slack0[k] = sol.z[cursor]
        cursor += 1
        if rec.outcome_set.q >= 2:
            slacks.append(sol.z[cursor : cursor + rec.outcome_set.q].copy())
            cursor += rec.outcome_set.q
        else:
            slacks.append(np.zeros(0))
    all_slacks = sol.z[n_samples:]
    max_slack = float(all_slacks.max()) if all_slacks.size else 0.0
    model = SurrogateModel(centers=samples, beta=beta, gamma=gamma)
    report = FitReport(
        slack0=slack0,
        slacks=tuple(slacks),
        objective_value=sol.objective,
        max_slack=max_slack,
    )
    return model, report


def _band_consistent(
    diff: float, os, sigma1: float, sigma2: float
) -> bool:
    low = bounds_for_level(os.p_min, sigma1, sigma2)
    high = bounds_for_level(os.p_max, sigma1, sigma2)
    return low.lower <= diff <= high.upper


def cross_validate_gamma(
    samples: np.ndarray,
    records: list[PreferenceRecord],
    grid,
    k_folds: int,
    sigma1: float,
    sigma2: float,
    lam: float,
    seed: int,
    fallback_gamma: float = DEFAULT_GAMMA,
    qp_options: QPOptions | None = None,
) -> float:
    """Pick the shape parameter by K-fold cross validation over records.

    The score of a candidate is the mean held-out fraction of records whose
    surrogate difference lands inside its zero-slack band.  Ties go to the
    smaller candidate.  With fewer records than folds, returns
    ``fallback_gamma`` untouched.
    """
    grid = [float(g) for g in grid]
    if not grid:
        raise EmptyGridError("gamma grid is empty")
    if k_folds < 2:
        raise ValueError("k_folds must be >= 2")
    m = len(records)
    if m < k_folds:
        return float(fallback_gamma)
    if len(grid) == 1:
        return grid[0]

    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    rng = np.random.default_rng(seed)
    order = rng.permutation(m)
    folds = [order[f::k_folds] for f in range(k_folds)]
    opts = qp_options or QPOptions(tol=1e-6)

    best_gamma = None
    best_score = -1.0
    for gamma in sorted(grid):
        scores = []
        for fold in folds:
            held = set(int(i) for i in fold)
            train = [rec for idx, rec in enumerate(records) if idx not in held]
            test = [records[idx] for idx in sorted(held)]
            if not test:
                continue
            model, _ = fit_surrogate(
                samples, train, sigma1, sigma2, lam, gamma, qp_options=opts
            )
            values = surrogate_eval_many(model, samples)
            hits = sum(
                1
                for rec in test
                if _band_consistent(
                    float(values[rec.i] - values[rec.j]),
                    rec.outcome_set,
                    sigma1,
                    sigma2,
                )
            )
            scores.append(hits / len(test))
        score = float(np.mean(scores)) if scores else 0.0
        if score > best_score + 1e-12:
            best_score = score
            best_gamma = gamma
    return best_gamma if best_gamma is not None else float(fallback_gamma)
