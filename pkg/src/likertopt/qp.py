"""Small dense convex quadratic programming.

Solves ``min 1/2 z'Qz + c'z  s.t.  A z <= b`` with Q symmetric positive
semidefinite (diagonal in this package's own use).  The method is a
primal-dual interior point iteration (Mehrotra predictor-corrector); the
contract is the KKT residual, not the algorithm.

Infinite bounds must be expressed by omitting rows, never by sentinel
values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    DimensionMismatchError,
    InfeasibleProblemError,
    NumericalBreakdownError,
)

STATUS_OPTIMAL = "optimal"
STATUS_MAX_ITERATIONS = "max_iterations"

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 20000

# Schur elimination pays off only past these sizes.
_SCHUR_MIN_COLS = 16
_SCHUR_MIN_ROWS = 64
_SCHUR_COL_NNZ_CAP = 8


@dataclass(frozen=True)
class QuadraticProgram:
    """Data of one QP.  ``q`` may be a 1-D diagonal or a full 2-D matrix."""

    q: np.ndarray
    c: np.ndarray
    a_mat: np.ndarray
    b_vec: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        c = np.asarray(self.c, dtype=float).reshape(-1)
        a = np.asarray(self.a_mat, dtype=float)
        b = np.asarray(self.b_vec, dtype=float).reshape(-1)
        n = c.shape[0]
        if a.size == 0:
            a = a.reshape(0, n)
        if q.ndim == 1:
            if q.shape != (n,):
                raise DimensionMismatchError("diagonal Q length != len(c)")
            if np.any(q < 0):
                raise DimensionMismatchError("diagonal Q must be nonnegative")
        else:
            if q.shape != (n, n):
                raise DimensionMismatchError("Q shape inconsistent with c")
            if not np.allclose(q, q.T, atol=1e-12):
                raise DimensionMismatchError("Q must be symmetric")
        if a.shape != (b.shape[0], n):
            raise DimensionMismatchError("A/b shapes inconsistent")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "a_mat", a)
        object.__setattr__(self, "b_vec", b)

    @property
    def n_z(self) -> int:
        return self.c.shape[0]

    @property
    def m(self) -> int:
        return self.b_vec.shape[0]

    @property
    def q_diag(self) -> np.ndarray | None:
        """Diagonal of Q when Q is stored or detectably diagonal."""
        if self.q.ndim == 1:
            return self.q
        if np.count_nonzero(self.q - np.diag(np.diagonal(self.q))) == 0:
            return np.diagonal(self.q).copy()
        return None

    def q_matvec(self, z: np.ndarray) -> np.ndarray:
        return self.q * z if self.q.ndim == 1 else self.q @ z

    def objective(self, z: np.ndarray) -> float:
        return float(0.5 * z @ self.q_matvec(z) + self.c @ z)


@dataclass(frozen=True)
class QPSolution:
    z: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    status: str


@dataclass
class _SchurPlan:
    """Column split for the Newton solves: a dense block plus columns that
    touch few rows each, no row touching two of them (their block of the
    normal matrix is then diagonal)."""

    free: np.ndarray          # dense column indices
    sparse: np.ndarray        # eliminated column indices
    nz_row: np.ndarray        # row index of each sparse nonzero
    nz_col: np.ndarray        # position within `sparse` of each nonzero
    nz_val: np.ndarray        # coefficient of each nonzero
    a_free: np.ndarray = field(default=None)  # (m, |free|)


def _analyze_structure(qp: QuadraticProgram) -> _SchurPlan | None:
    if qp.m < _SCHUR_MIN_ROWS:
        return None
    if qp.q_diag is None:
        return None
    a = qp.a_mat
    nz = a != 0.0
    col_nnz = nz.sum(axis=0)
    candidate = col_nnz <= _SCHUR_COL_NNZ_CAP
    if candidate.sum() < _SCHUR_MIN_COLS:
        return None
    # Rows touching two candidate columns would couple them; demote those
    # columns to the dense block.
    per_row = nz[:, candidate].sum(axis=1)
    bad_rows = per_row >= 2
    if bad_rows.any():
        coupled = nz[bad_rows].any(axis=0)
        candidate = candidate & ~coupled
        if candidate.sum() < _SCHUR_MIN_COLS:
            return None
    sparse = np.flatnonzero(candidate)
    free = np.flatnonzero(~candidate)
    rows, cols = np.nonzero(nz[:, sparse])
    return _SchurPlan(
        free=free,
        sparse=sparse,
        nz_row=rows,
        nz_col=cols,
        nz_val=a[rows, sparse[cols]],
        a_free=np.ascontiguousarray(a[:, free]),
    )


def _cholesky(mat: np.ndarray):
    """Cholesky with escalating jitter; raises NumericalBreakdownError."""
    scale = max(float(np.max(np.abs(np.diagonal(mat)))), 1.0)
    jitter = 0.0
    for _ in range(6):
        try:
            return cho_factor(
                mat if jitter == 0.0 else mat + jitter * np.eye(mat.shape[0]),
                lower=True,
                check_finite=False,
            )
        except np.linalg.LinAlgError:
            jitter = scale * 1e-14 if jitter == 0.0 else jitter * 100.0
    raise NumericalBreakdownError("Newton system not positive definite")


class _KKTSolver:
    """Factorizes ``Q + A' diag(d) A`` once per interior-point iteration."""

    def __init__(self, qp: QuadraticProgram, plan: _SchurPlan | None):
        self.qp = qp
        self.plan = plan

    def factor(self, d: np.ndarray) -> None:
        qp, plan = self.qp, self.plan
        if plan is None:
            ad = qp.a_mat * d[:, None]
            mat = qp.a_mat.T @ ad
            if qp.q.ndim == 1:
                mat[np.diag_indices_from(mat)] += qp.q
            else:
                mat = mat + qp.q
            self._chol = _cholesky(mat)
            return
        q_diag = qp.q_diag
        w = d[plan.nz_row] * plan.nz_val
        self._ss = q_diag[plan.sparse] + np.bincount(
            plan.nz_col, weights=w * plan.nz_val, minlength=plan.sparse.size
        )
        if np.any(self._ss <= 0):
            # an eliminated column with zero curvature; fall back to dense
            self.plan = None
            self.factor(d)
            return
        f = plan.free.size
        fs = np.zeros((plan.sparse.size, f))
        if plan.nz_row.size:
            np.add.at(fs, plan.nz_col, plan.a_free[plan.nz_row] * w[:, None])
        self._fs = fs.T  # (f, |sparse|)
        ff = plan.a_free.T @ (plan.a_free * d[:, None])
        ff[np.diag_indices_from(ff)] += q_diag[plan.free]
        ff -= (self._fs / self._ss) @ self._fs.T
        self._chol = _cholesky(ff) if f else None

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        plan = self.plan
        if plan is None:
            return cho_solve(self._chol, rhs, check_finite=False)
        r_f = rhs[plan.free]
        r_s = rhs[plan.sparse]
        out = np.empty_like(rhs)
        if plan.free.size:
            u_f = cho_solve(
                self._chol, r_f - self._fs @ (r_s / self._ss), check_finite=False
            )
            out[plan.free] = u_f
            out[plan.sparse] = (r_s - self._fs.T @ u_f) / self._ss
        else:
            out[plan.sparse] = r_s / self._ss
        return out


def _solve_unconstrained(qp: QuadraticProgram, tol: float) -> QPSolution:
    if qp.q_diag is not None:
        qd = qp.q_diag
        z = np.zeros(qp.n_z)
        pos = qd > 0
        z[pos] = -qp.c[pos] / qd[pos]
        if np.any(np.abs(qp.c[~pos]) > 0):
            raise NumericalBreakdownError("unbounded unconstrained QP")
    else:
        z, residual, *_ = np.linalg.lstsq(qp.q, -qp.c, rcond=None)
        if np.linalg.norm(qp.q_matvec(z) + qp.c, np.inf) > 1e-8 * (
            1 + np.linalg.norm(qp.c, np.inf)
        ):
            raise NumericalBreakdownError("unbounded unconstrained QP")
    kkt = float(
        np.linalg.norm(qp.q_matvec(z) + qp.c, np.inf)
        / (1.0 + np.linalg.norm(qp.c, np.inf))
    )
    return QPSolution(z, qp.objective(z), kkt, 0, STATUS_OPTIMAL)


def _max_step(v: np.ndarray, dv: np.ndarray) -> float:
    neg = dv < 0
    if not neg.any():
        return 1.0
    return min(1.0, float(np.min(-v[neg] / dv[neg])))


def solve_qp(
    qp: QuadraticProgram,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> QPSolution:
    """Solve the QP to the requested KKT residual.

    The residual is ``max(primal, dual, complementarity)`` with primal/dual
    parts normalized by ``1 + ||b||_inf`` and ``1 + ||c||_inf``.  Raises
    InfeasibleProblemError on divergence consistent with an empty feasible
    set, NumericalBreakdownError on irrecoverable linear-algebra failure.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if qp.m == 0:
        return _solve_unconstrained(qp, tol)

    a = qp.a_mat
    b = qp.b_vec
    c = qp.c
    m = qp.m
    bnorm = 1.0 + float(np.linalg.norm(b, np.inf))
    cnorm = 1.0 + float(np.linalg.norm(c, np.inf))

    kkt = _KKTSolver(qp, _analyze_structure(qp))

    z = np.zeros(qp.n_z)
    s = np.maximum(1.0, np.abs(b))
    y = np.ones(m)

    best_rp = np.inf
    iterations = 0
    res = np.inf
    for iterations in range(1, max_iter + 1):
        rd = qp.q_matvec(z) + c + a.T @ y
        rp = a @ z + s - b
        mu = float(y @ s) / m
        res = max(
            float(np.linalg.norm(rp, np.inf)) / bnorm,
            float(np.linalg.norm(rd, np.inf)) / cnorm,
            mu,
        )
        if res <= tol:
            return QPSolution(z, qp.objective(z), res, iterations - 1, STATUS_OPTIMAL)

        rp_norm = float(np.linalg.norm(rp, np.inf)) / bnorm
        best_rp = min(best_rp, rp_norm)
        if float(np.linalg.norm(y, np.inf)) > 1e13:
            if rp_norm > max(1e-6, 10 * tol) or best_rp > max(1e-6, 10 * tol):
                raise InfeasibleProblemError("dual iterates diverge; no feasible point")
            raise NumericalBreakdownError("interior-point iterates diverged")
        if float(np.linalg.norm(z, np.inf)) > 1e13:
            raise NumericalBreakdownError("primal iterates diverged (unbounded?)")

        d = y / s
        kkt.factor(d)

        # predictor
        dz_aff = kkt.solve(-rd + a.T @ (y - d * rp))
        ds_aff = -rp - a @ dz_aff
        dy_aff = -y - d * ds_aff
        alpha_aff = min(_max_step(s, ds_aff), _max_step(y, dy_aff))
        mu_aff = float((y + alpha_aff * dy_aff) @ (s + alpha_aff * ds_aff)) / m
        sigma = min(1.0, (max(mu_aff, 0.0) / mu) ** 3) if mu > 0 else 0.0

        # corrector
        corr = (sigma * mu - ds_aff * dy_aff) / s
        dz = kkt.solve(-rd + a.T @ (y - corr - d * rp))
        ds = -rp - a @ dz
        dy = -y + corr - d * ds

        eta = 1.0 - min(0.1, 100.0 * mu)
        alpha = eta * min(_max_step(s, ds), _max_step(y, dy))
        alpha = min(1.0, alpha)
        z = z + alpha * dz
        s = s + alpha * ds
        y = y + alpha * dy
        s = np.maximum(s, 1e-300)
        y = np.maximum(y, 1e-300)

    return QPSolution(z, qp.objective(z), res, iterations, STATUS_MAX_ITERATIONS)
