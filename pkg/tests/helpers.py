"""Independent reference solvers used as test oracles.

These deliberately avoid the production code paths: the box reference is a
plain primal projected-gradient iteration, and the preference-fit reference
works on the dual of the slack-eliminated fit problem (hinge form), solved
by accelerated projected gradient with a duality-gap certificate.
"""

from __future__ import annotations

import math

import numpy as np

from likertopt.preferences import bounds_for_level, record_weights


def pg_box_objective(q_diag, c, lo, hi, iters=1_000_000):
    """Optimal objective of ``min 1/2 z'diag(q)z + c'z`` on a box, by
    projected gradient with a fixed step."""
    q_diag = np.asarray(q_diag, dtype=float)
    c = np.asarray(c, dtype=float)
    z = np.clip(np.zeros_like(c), lo, hi)
    step = 1.0 / float(q_diag.max())
    for _ in range(iters):
        z_new = np.clip(z - step * (q_diag * z + c), lo, hi)
        if np.array_equal(z_new, z):
            break
        z = z_new
    return float(0.5 * z @ (q_diag * z) + c @ z), z


def pg_box_objective_batch(programs, iters=1_000_000):
    """Vectorized :func:`pg_box_objective` over a list of
    ``(q_diag, c, lo, hi)`` programs of possibly different sizes."""
    count = len(programs)
    width = max(len(p[0]) for p in programs)
    q = np.ones((count, width))
    c = np.zeros((count, width))
    lo = np.zeros((count, width))
    hi = np.zeros((count, width))
    for k, (qk, ck, lok, hik) in enumerate(programs):
        n = len(qk)
        q[k, :n], c[k, :n], lo[k, :n], hi[k, :n] = qk, ck, lok, hik
    z = np.clip(np.zeros_like(c), lo, hi)
    step = 1.0 / q.max(axis=1, keepdims=True)
    for _ in range(iters):
        z = np.clip(z - step * (q * z + c), lo, hi)
    return 0.5 * np.sum(z * q * z, axis=1) + np.sum(c * z, axis=1)


def _hinges(samples, records, sigma1, sigma2, gamma):
    """Hinge decomposition of the preference-fit objective: terms
    ``u * max(0, g + a'beta)``, one per finite band side."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    d2 = (
        np.sum(samples**2, axis=1)[:, None]
        + np.sum(samples**2, axis=1)[None, :]
        - 2.0 * samples @ samples.T
    )
    phi = 1.0 / (1.0 + (gamma * np.maximum(d2, 0.0)) ** 2)
    rows = []
    rhs = []
    weights = []

    def add_band(diff, p_low, p_high, weight):
        if weight <= 0.0:
            return
        low = bounds_for_level(p_low, sigma1, sigma2)
        high = bounds_for_level(p_high, sigma1, sigma2)
        if math.isfinite(low.lower):
            rows.append(-diff)
            rhs.append(low.lower)
            weights.append(weight)
        if math.isfinite(high.upper):
            rows.append(diff)
            rhs.append(-high.upper)
            weights.append(weight)

    for rec in records:
        diff = phi[rec.i] - phi[rec.j]
        os = rec.outcome_set
        b_h, w = record_weights(os)
        add_band(diff, os.p_min, os.p_max, b_h)
        if os.q >= 2:
            for t, outcome in enumerate(os.outcomes):
                add_band(diff, outcome.p, outcome.p, w[t])
    a = np.array(rows) if rows else np.zeros((0, samples.shape[0]))
    return a, np.array(rhs), np.array(weights)


def reference_fit_objective(
    samples,
    records,
    sigma1,
    sigma2,
    lam,
    gamma,
    max_iters=2_000_000,
    gap_tol=1e-10,
):
    """Optimal value of the preference-fit problem.

    Eliminating each slack analytically turns the fit into
    ``lam/2 ||beta||^2 + sum_k u_k max(0, g_k + a_k'beta)``, whose dual is a
    box-constrained concave quadratic solved here by accelerated projected
    gradient.  Iterates until the duality gap certifies ``gap_tol``.
    """
    a, g, u = _hinges(samples, records, sigma1, sigma2, gamma)
    if a.shape[0] == 0:
        return 0.0
    gram = a @ a.T
    lip = float(np.linalg.eigvalsh(a.T @ a).max()) / lam
    lip = max(lip, 1e-12)

    def dual_value(theta):
        v = a.T @ theta
        return float(theta @ g) - float(v @ v) / (2.0 * lam)

    def primal_value(theta):
        beta = -(a.T @ theta) / lam
        margins = g + a @ beta
        return 0.5 * lam * float(beta @ beta) + float(u @ np.maximum(margins, 0.0))

    theta = np.zeros_like(g)
    momentum = theta.copy()
    t_prev = 1.0
    best_primal = primal_value(theta)
    last_dual = dual_value(theta)
    for k in range(1, max_iters + 1):
        grad = g - gram @ momentum / lam
        theta_new = np.clip(momentum + grad / lip, 0.0, u)
        t_new = (1.0 + math.sqrt(1.0 + 4.0 * t_prev * t_prev)) / 2.0
        momentum = theta_new + (t_prev - 1.0) / t_new * (theta_new - theta)
        if dual_value(theta_new) < last_dual:  # restart on non-monotone step
            momentum = theta_new.copy()
            t_new = 1.0
        theta, t_prev = theta_new, t_new
        if k % 200 == 0:
            last_dual = dual_value(theta)
            best_primal = min(best_primal, primal_value(theta))
            if best_primal - last_dual <= gap_tol:
                break
    return min(best_primal, primal_value(theta))
