"""Euclidean projection onto a polyhedron by a dual active-set method.

Solves ``min ||x - a||^2  s.t.  A @ x >= g``.  Stationarity gives
``x = a + A.T @ lam / 2`` with multipliers ``lam >= 0``, so the dual is a
nonnegatively-constrained quadratic in ``lam`` and the classic active-set
iteration applies: add the most violated constraint, re-solve the
equality-constrained subproblem on the active set, and step back whenever
a multiplier would turn negative.

When the entering constraint row is linearly dependent on the active rows
(a degenerate vertex), pinning everything to equality is inconsistent;
the method instead takes a dual step that shifts multiplier mass onto the
entering row along the null direction until a blocking active constraint
drops out, which strictly decreases the dual objective and so cannot
cycle.
"""

from __future__ import annotations

import numpy as np

from ._types import LinearConstraints, SolverReport, SolverTolerances, SolveStatus

_DEP_TOL = 1e-9


class _ActiveSet:
    """Active constraint indices with their multipliers."""

    def __init__(self):
        self.idx: list[int] = []
        self.lam = np.zeros(0)

    def drop(self, keep_mask):
        self.idx = [i for i, k in zip(self.idx, keep_mask) if k]
        self.lam = self.lam[keep_mask]


def _eqp_multipliers(A, a, g, idx):
    """Multipliers making x = a + A_P.T lam / 2 satisfy A_P x = g_P."""
    AP = A[idx]
    M = 0.5 * (AP @ AP.T)
    q = g[idx] - AP @ a
    try:
        return np.linalg.solve(M, q)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(M, q, rcond=None)[0]


def solve_qp_identity(
    a,
    constraints: LinearConstraints,
    tolerances: SolverTolerances | None = None,
) -> SolverReport:
    """Minimize ``||x - a||^2`` subject to ``A @ x >= g``.

    The objective is strictly convex, so Optimal reports carry the unique
    minimizer; the KKT residual aggregates stationarity, dual sign and
    complementary-slackness errors.  Infeasible polyhedra are detected via
    an unbounded dual ray.
    """
    tols = tolerances or SolverTolerances()
    a = np.asarray(a, dtype=float).ravel()
    A, g = constraints.A, constraints.g
    m, d = A.shape
    if len(a) != d:
        raise ValueError("target length must match the number of columns of A")

    g_scale = 1.0 + float(np.abs(g).max(initial=0.0))
    feas_tol = tols.feasibility * g_scale
    max_iter = tols.max_iterations(d, m)

    x = a.copy()
    P = _ActiveSet()
    iters = 0
    status = SolveStatus.Optimal

    while True:
        slack = A @ x - g
        if P.idx:
            slack[P.idx] = np.inf  # pinned to equality already
        entering = int(np.argmin(slack))
        if slack[entering] >= -feas_tol:
            break
        if iters >= max_iter:
            status = SolveStatus.MaxIterations
            break
        row = A[entering]

        # Degeneracy guard: express the entering row over the active rows.
        # While dependent, trade multiplier mass onto the entering row
        # (x unchanged) until a blocking constraint leaves the active set.
        guard_ok = True
        while P.idx:
            APt = A[P.idx].T
            r, res, *_ = np.linalg.lstsq(APt, row, rcond=None)
            rho = float(np.linalg.norm(APt @ r - row))
            if rho > _DEP_TOL * (1.0 + float(np.linalg.norm(row))):
                break  # independent; proceed with the regular step
            pos = r > tols.pivot
            if not np.any(pos):
                status = SolveStatus.Infeasible
                guard_ok = False
                break
            with np.errstate(divide="ignore"):
                t = np.where(pos, P.lam / np.where(pos, r, 1.0), np.inf)
            t_star = float(t.min())
            P.lam = P.lam - t_star * r
            P.drop(P.lam > tols.pivot)
            iters += 1
            if iters >= max_iter:
                status = SolveStatus.MaxIterations
                guard_ok = False
                break
        if not guard_ok:
            break

        P.idx.append(entering)
        P.lam = np.append(P.lam, 0.0)

        # Inner loop: restore lam >= 0 on the active set.
        while True:
            iters += 1
            lam_new = _eqp_multipliers(A, a, g, P.idx)
            if np.all(lam_new >= -tols.optimality):
                P.lam = np.maximum(lam_new, 0.0)
                break
            with np.errstate(divide="ignore", invalid="ignore"):
                steps = P.lam / (P.lam - lam_new)
            steps[lam_new >= 0] = np.inf
            alpha = float(steps.min())
            P.lam = P.lam + alpha * (lam_new - P.lam)
            keep = P.lam > tols.pivot
            P.drop(keep)
            if not P.idx or iters >= max_iter:
                break
        x = a + 0.5 * (A[P.idx].T @ P.lam) if P.idx else a.copy()
        if iters >= max_iter and status is SolveStatus.Optimal:
            status = SolveStatus.MaxIterations
            break

    lam = np.zeros(m)
    if P.idx:
        lam[P.idx] = P.lam
    slack = A @ x - g
    violation = max(0.0, float(-slack.min(initial=0.0)))
    stationarity = float(np.abs(2.0 * (x - a) - A.T @ lam).max(initial=0.0))
    comp = float(np.abs(lam * slack).max(initial=0.0)) / g_scale
    kkt = max(stationarity / (1.0 + float(np.abs(a).max(initial=0.0))), comp)
    objective = float(np.sum((x - a) ** 2))
    return SolverReport(x, status, objective, violation, kkt, iters)
