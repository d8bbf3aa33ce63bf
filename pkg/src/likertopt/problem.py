"""Optimization problem definition: box bounds, linear constraints, scaling.

All numeric machinery (surrogate, acquisition, global search) operates on
coordinates affinely mapped onto ``[-1, 1]^n``; user-facing I/O stays in
original units.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyBoxError,
    NonFiniteBoundError,
    OutOfBoundsError,
)

DEFAULT_FEASIBILITY_TOL = 1e-9


@dataclass
class ProblemSpec:
    """Raw, unvalidated problem description.

    ``linear_constraints`` rows are ``(a, b)`` meaning ``a . x - b <= 0``.
    """

    n: int
    lower: list | tuple | np.ndarray
    upper: list | tuple | np.ndarray
    linear_constraints: list[tuple] = field(default_factory=list)


@dataclass(frozen=True)
class ValidatedProblem:
    """Validated problem handle accepted by all downstream modules."""

    n: int
    lower: np.ndarray
    upper: np.ndarray
    a_mat: np.ndarray  # (m, n), may be empty
    b_vec: np.ndarray  # (m,)

    @property
    def has_linear_constraints(self) -> bool:
        return self.a_mat.shape[0] > 0


def validate_problem(spec: ProblemSpec) -> ValidatedProblem:
    """Check a ProblemSpec and return the validated handle.

    Raises DimensionMismatchError, EmptyBoxError or NonFiniteBoundError.
    """
    n = int(spec.n)
    if n < 1:
        raise DimensionMismatchError(f"decision dimension must be >= 1, got {n}")
    lower = np.asarray(spec.lower, dtype=float).reshape(-1)
    upper = np.asarray(spec.upper, dtype=float).reshape(-1)
    if lower.shape != (n,) or upper.shape != (n,):
        raise DimensionMismatchError(
            f"bounds must have length {n}, got {lower.shape[0]} and {upper.shape[0]}"
        )
    if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
        raise NonFiniteBoundError("bounds must be finite")
    if np.any(lower >= upper):
        k = int(np.argmax(lower >= upper))
        raise EmptyBoxError(f"lower[{k}]={lower[k]} >= upper[{k}]={upper[k]}")

    rows = []
    rhs = []
    for a, b in spec.linear_constraints:
        a = np.asarray(a, dtype=float).reshape(-1)
        if a.shape != (n,):
            raise DimensionMismatchError(
                f"constraint row has length {a.shape[0]}, expected {n}"
            )
        if not (np.isfinite(a).all() and np.isfinite(b)):
            raise NonFiniteBoundError("constraint coefficients must be finite")
        rows.append(a)
        rhs.append(float(b))
    a_mat = np.array(rows, dtype=float) if rows else np.zeros((0, n))
    b_vec = np.array(rhs, dtype=float) if rhs else np.zeros(0)
    lower = lower.copy()
    upper = upper.copy()
    lower.flags.writeable = False
    upper.flags.writeable = False
    a_mat.flags.writeable = False
    b_vec.flags.writeable = False
    return ValidatedProblem(n=n, lower=lower, upper=upper, a_mat=a_mat, b_vec=b_vec)


def scale_point(problem: ValidatedProblem, x: np.ndarray) -> np.ndarray:
    """Map a point from the original box onto ``[-1, 1]^n``.

    ``x`` must lie inside the box within 1e-9.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (problem.n,):
        raise DimensionMismatchError(f"point has length {x.shape[0]}, expected {problem.n}")
    if np.any(x < problem.lower - 1e-9) or np.any(x > problem.upper + 1e-9):
        raise OutOfBoundsError(f"point {x} outside box")
    return (2.0 * x - (problem.lower + problem.upper)) / (problem.upper - problem.lower)


def unscale_point(problem: ValidatedProblem, s: np.ndarray) -> np.ndarray:
    """Inverse of :func:`scale_point`."""
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.shape != (problem.n,):
        raise DimensionMismatchError(f"point has length {s.shape[0]}, expected {problem.n}")
    return (s * (problem.upper - problem.lower) + (problem.lower + problem.upper)) / 2.0


def scale_points(problem: ValidatedProblem, xs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`scale_point` over the rows of ``xs``."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    return (2.0 * xs - (problem.lower + problem.upper)) / (problem.upper - problem.lower)


def unscale_points(problem: ValidatedProblem, ss: np.ndarray) -> np.ndarray:
    """Vectorized :func:`unscale_point` over the rows of ``ss``."""
    ss = np.atleast_2d(np.asarray(ss, dtype=float))
    return (ss * (problem.upper - problem.lower) + (problem.lower + problem.upper)) / 2.0


def is_feasible(
    problem: ValidatedProblem, x: np.ndarray, tol: float = DEFAULT_FEASIBILITY_TOL
) -> bool:
    """True iff the box and every linear constraint hold within ``tol``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (problem.n,):
        return False
    if np.any(x < problem.lower - tol) or np.any(x > problem.upper + tol):
        return False
    if problem.has_linear_constraints:
        if np.any(problem.a_mat @ x - problem.b_vec > tol):
            return False
    return True


def problem_to_json(problem: ValidatedProblem) -> str:
    obj = {
        "n": problem.n,
        "lower": problem.lower.tolist(),
        "upper": problem.upper.tolist(),
        "linear": [
            {"a": a.tolist(), "b": float(b)}
            for a, b in zip(problem.a_mat, problem.b_vec)
        ],
    }
    return json.dumps(obj)


def problem_from_dict(obj: dict) -> ValidatedProblem:
    spec = ProblemSpec(
        n=obj["n"],
        lower=obj["lower"],
        upper=obj["upper"],
        linear_constraints=[(row["a"], row["b"]) for row in obj.get("linear", [])],
    )
    return validate_problem(spec)


def problem_from_json(text: str) -> ValidatedProblem:
    return problem_from_dict(json.loads(text))
