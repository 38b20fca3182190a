"""Pure-numpy simplex pivot loop (fallback for the compiled kernel).

Operates in place on a dense tableau ``T`` of shape (r+1, ncols) whose last
column is the right-hand side and whose last row holds reduced costs with
``T[r, -1] == -objective``.  ``basis[i]`` is the column basic in row ``i``.

Pivot selection is Dantzig's rule with a switch to Bland's rule after
``stall_limit`` consecutive degenerate pivots, which restores the finite-
termination guarantee while keeping the fast rule on nondegenerate steps.
The ratio test clamps slightly-negative right-hand sides, refuses pivots
below a two-tier magnitude floor (tiny pivots wreck the tableau), and
among near-tied rows picks the numerically largest pivot — except in
Bland mode, where the smallest basis label preserves the anti-cycling
guarantee.
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
MAX_ITER = 2

_PIVOT_FLOOR = 1e-8
_TIE_REL = 1e-9


def run_pivots(T, basis, n_enterable, tol, piv_tol, max_iter, stall_limit=32):
    """Pivot to optimality.  Returns (status_code, iterations_used)."""
    r = T.shape[0] - 1
    obj_row = T[r]
    iters = 0
    bland = False
    stall = 0
    floor_hi = max(_PIVOT_FLOOR, piv_tol)
    while iters < max_iter:
        # entering column
        if bland:
            enter = -1
            for j in range(n_enterable):
                if obj_row[j] < -tol:
                    enter = j
                    break
            if enter == -1:
                return OPTIMAL, iters
        else:
            enter = int(np.argmin(obj_row[:n_enterable]))
            if obj_row[enter] >= -tol:
                return OPTIMAL, iters

        # ratio test with clamped rhs and a pivot-magnitude floor
        col = T[:r, enter]
        eligible = col > floor_hi
        if not np.any(eligible):
            eligible = col > piv_tol
            if not np.any(eligible):
                return UNBOUNDED, iters
        rhs = np.maximum(T[:r, -1], 0.0)
        ratios = np.full(r, np.inf)
        ratios[eligible] = rhs[eligible] / col[eligible]
        best = ratios.min()
        ties = np.nonzero(ratios <= best + _TIE_REL * (1.0 + best))[0]
        if bland:
            leave = int(ties[np.argmin(basis[ties])])
        else:
            leave = int(ties[np.argmax(col[ties])])

        # pivot
        piv = T[leave, enter]
        T[leave] /= piv
        factors = T[:, enter].copy()
        factors[leave] = 0.0
        T -= np.outer(factors, T[leave])
        T[:, enter] = 0.0
        T[leave, enter] = 1.0
        basis[leave] = enter
        iters += 1

        # stall detection: a zero-step (degenerate) pivot makes no progress
        if best <= piv_tol:
            stall += 1
            if stall >= stall_limit:
                bland = True
        else:
            stall = 0
            bland = False
    return MAX_ITER, iters
