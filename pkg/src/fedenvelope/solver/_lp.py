"""Dense linear programming for ``min c @ x  s.t.  A @ x >= g`` (x free).

The free-variable inequality form is solved through its dual

    max g @ y   s.t.   A.T @ y = c,  y >= 0,

a standard-form program handled by a two-phase tableau simplex.  The dual
route keeps the tableau at d+1 rows (d = number of primal variables), which
is far smaller than the primal standard form for envelope problems where
the constraint count m is the large dimension.  The primal solution is
recovered from the simplex multipliers of the optimal dual basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernel import MAX_ITER, UNBOUNDED, run_pivots
from ._types import LinearConstraints, SolverReport, SolverTolerances, SolveStatus

_STALL_LIMIT = 32


@dataclass
class _StandardResult:
    status: SolveStatus
    y: np.ndarray
    multipliers: np.ndarray
    objective: float
    iterations: int


def solve_standard_form(cost, B, rhs, tols: SolverTolerances, max_iter=None):
    """Two-phase simplex for ``min cost @ y  s.t.  B @ y = rhs, y >= 0``.

    Returns a :class:`_StandardResult`; ``multipliers`` are the duals of the
    equality rows (valid only for Optimal status).
    """
    cost = np.asarray(cost, dtype=float)
    B = np.asarray(B, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    r, nv = B.shape
    if max_iter is None:
        max_iter = tols.max_iterations(r, nv)

    sign = np.where(rhs < 0, -1.0, 1.0)
    Bs = B * sign[:, None]
    bs = rhs * sign

    # Deterministic right-hand-side perturbation.  Envelope duals have an
    # extremely sparse rhs, making every basis degenerate and the plain
    # simplex prone to endless degenerate pivoting.  Optimality of a basis
    # (reduced costs >= 0) does not depend on the rhs, so the basis found
    # for the perturbed problem is optimal for the true one; exact basic
    # values are recomputed from that basis afterwards.
    scale = 1.0 + float(np.abs(bs).max(initial=0.0))
    pert = 1e-10 * scale * (1.0 + np.arange(r)) / (r + 1.0)
    bp = bs + pert

    T = np.zeros((r + 1, nv + r + 1))
    T[:r, :nv] = Bs
    T[:r, nv : nv + r] = np.eye(r)
    T[:r, -1] = bp
    T[r, :nv] = -Bs.sum(axis=0)
    T[r, -1] = -bp.sum()
    basis = np.arange(nv, nv + r, dtype=np.int64)

    def _fail(status, iters):
        return _StandardResult(status, np.zeros(nv), np.zeros(r), np.nan, iters)

    code, it1 = run_pivots(T, basis, nv, tols.optimality, tols.pivot, max_iter, _STALL_LIMIT)
    if code == MAX_ITER:
        return _fail(SolveStatus.MaxIterations, it1)
    phase1_obj = -T[r, -1]
    if phase1_obj > tols.feasibility * scale + pert.sum():
        return _fail(SolveStatus.Infeasible, it1)

    # Drive leftover artificial variables out of the basis.  A row whose
    # original-variable entries are all ~0 is a redundant constraint; its
    # artificial stays basic at value zero and is harmless because the
    # artificial columns are never enterable.
    for i in range(r):
        if basis[i] >= nv:
            piv_col = -1
            for j in range(nv):
                if abs(T[i, j]) > 1e3 * tols.pivot:
                    piv_col = j
                    break
            if piv_col >= 0:
                T[i] /= T[i, piv_col]
                factors = T[:, piv_col].copy()
                factors[i] = 0.0
                T -= np.outer(factors, T[i])
                T[:, piv_col] = 0.0
                T[i, piv_col] = 1.0
                basis[i] = piv_col

    # Phase 2: install the real objective row, reduced over the basis.
    T[r, :] = 0.0
    T[r, :nv] = cost
    for i in range(r):
        if basis[i] < nv and cost[basis[i]] != 0.0:
            T[r] -= cost[basis[i]] * T[i]

    code, it2 = run_pivots(
        T, basis, nv, tols.optimality, tols.pivot, max_iter - it1, _STALL_LIMIT
    )
    iters = it1 + it2
    if code == MAX_ITER:
        return _fail(SolveStatus.MaxIterations, iters)
    if code == UNBOUNDED:
        return _fail(SolveStatus.Unbounded, iters)

    # Recompute basic values and multipliers exactly from the final basis
    # against the unperturbed rhs: the pivot loop only needs to identify the
    # optimal basis, and the reported solution is then free of both the rhs
    # perturbation and any accumulated tableau drift.
    M_B = np.zeros((r, r))
    cost_B = np.zeros(r)
    for i in range(r):
        if basis[i] < nv:
            M_B[:, i] = Bs[:, basis[i]]
            cost_B[i] = cost[basis[i]]
        else:
            M_B[basis[i] - nv, i] = 1.0
    try:
        z = np.linalg.solve(M_B, bs)
        pi = np.linalg.solve(M_B.T, cost_B)
    except np.linalg.LinAlgError:
        z = np.linalg.lstsq(M_B, bs, rcond=None)[0]
        pi = np.linalg.lstsq(M_B.T, cost_B, rcond=None)[0]
    y = np.zeros(nv)
    for i in range(r):
        if basis[i] < nv:
            y[basis[i]] = max(float(z[i]), 0.0)
    multipliers = pi * sign
    return _StandardResult(SolveStatus.Optimal, y, multipliers, float(cost @ y), iters)


def solve_lp(
    c,
    constraints: LinearConstraints,
    tolerances: SolverTolerances | None = None,
) -> SolverReport:
    """Minimize ``c @ x`` over ``A @ x >= g`` with free ``x``.

    Optimal reports carry a feasible ``x`` together with certificate
    residuals (primal violation and an aggregate KKT residual covering the
    duality gap, dual stationarity and complementary slackness).
    """
    tols = tolerances or SolverTolerances()
    c = np.asarray(c, dtype=float).ravel()
    A, g = constraints.A, constraints.g
    m, d = A.shape
    if len(c) != d:
        raise ValueError("objective length must match the number of columns of A")
    max_iter = tols.max_iterations(d, m)

    dual = solve_standard_form(-g, A.T, c, tols, max_iter)
    nan_x = np.full(d, np.nan)

    if dual.status is SolveStatus.MaxIterations:
        return SolverReport(nan_x, SolveStatus.MaxIterations, np.nan, np.nan, np.nan,
                            dual.iterations)
    if dual.status is SolveStatus.Unbounded:
        # Dual unbounded above => primal infeasible.
        return SolverReport(nan_x, SolveStatus.Infeasible, np.nan, np.nan, np.nan,
                            dual.iterations)
    if dual.status is SolveStatus.Infeasible:
        status = SolveStatus.Unbounded if _primal_feasible(A, g, tols) \
            else SolveStatus.Infeasible
        return SolverReport(nan_x, status, np.nan, np.nan, np.nan, dual.iterations)

    x = -dual.multipliers
    y = dual.y
    objective = float(c @ x)
    slack = A @ x - g
    g_scale = 1.0 + float(np.abs(g).max(initial=0.0))
    violation = max(0.0, float(-slack.min(initial=0.0)))
    gap = abs(objective - float(g @ y)) / (1.0 + abs(objective))
    stationarity = float(np.abs(A.T @ y - c).max(initial=0.0)) / (1.0 + float(np.abs(c).max(initial=0.0)))
    comp_slack = float(np.abs(y * slack).max(initial=0.0)) / g_scale
    kkt = max(gap, stationarity, comp_slack)

    status = SolveStatus.Optimal
    if violation > 1e3 * tols.feasibility * g_scale or kkt > 1e3 * tols.optimality:
        # Certificates failed badly despite simplex convergence; the basis
        # system was too ill-conditioned to trust.
        status = SolveStatus.RankDeficient
    return SolverReport(x, status, objective, violation, kkt, dual.iterations)


def _primal_feasible(A, g, tols: SolverTolerances) -> bool:
    """Check ``exists x: A x >= g`` via the dual of min-tau relaxation.

    The relaxed program min tau s.t. A x + tau >= g, tau >= 0 has dual
    max g @ y s.t. A.T y = 0, sum(y) <= 1, y >= 0, which is always feasible
    and bounded; its optimum is zero exactly when the original system is
    feasible.
    """
    m, d = A.shape
    B = np.zeros((d + 1, m + 1))
    B[:d, :m] = A.T
    B[d, :m] = 1.0
    B[d, m] = 1.0
    rhs = np.zeros(d + 1)
    rhs[d] = 1.0
    cost = np.concatenate([-g, [0.0]])
    res = solve_standard_form(cost, B, rhs, tols)
    if res.status is not SolveStatus.Optimal:
        return False
    g_scale = 1.0 + float(np.abs(g).max(initial=0.0))
    return -res.objective <= tols.feasibility * g_scale
