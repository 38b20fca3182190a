# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simplex pivot loop; semantics match _simplex_py.run_pivots."""

import numpy as np

cimport cython
from libc.math cimport INFINITY

OPTIMAL = 0
UNBOUNDED = 1
MAX_ITER = 2

cdef double _PIVOT_FLOOR = 1e-8
cdef double _TIE_REL = 1e-9


def run_pivots(double[:, ::1] T, long long[::1] basis, int n_enterable,
               double tol, double piv_tol, long max_iter, int stall_limit=32):
    cdef int r = T.shape[0] - 1
    cdef int ncols = T.shape[1]
    cdef int rhs_col = ncols - 1
    cdef long iters = 0
    cdef bint bland = False
    cdef int stall = 0
    cdef int i, j, enter, leave
    cdef double best_cost, ratio, best, piv, f, rhs_i, tie_hi
    cdef double floor_hi = _PIVOT_FLOOR if piv_tol < _PIVOT_FLOOR else piv_tol
    cdef double floor_use

    while iters < max_iter:
        # entering column
        enter = -1
        if bland:
            for j in range(n_enterable):
                if T[r, j] < -tol:
                    enter = j
                    break
            if enter == -1:
                return OPTIMAL, iters
        else:
            best_cost = T[r, 0]
            enter = 0
            for j in range(1, n_enterable):
                if T[r, j] < best_cost:
                    best_cost = T[r, j]
                    enter = j
            if best_cost >= -tol:
                return OPTIMAL, iters

        # ratio test with clamped rhs and a pivot-magnitude floor
        floor_use = floor_hi
        best = INFINITY
        for i in range(r):
            piv = T[i, enter]
            if piv > floor_use:
                rhs_i = T[i, rhs_col]
                if rhs_i < 0.0:
                    rhs_i = 0.0
                ratio = rhs_i / piv
                if ratio < best:
                    best = ratio
        if best == INFINITY:
            floor_use = piv_tol
            for i in range(r):
                piv = T[i, enter]
                if piv > floor_use:
                    rhs_i = T[i, rhs_col]
                    if rhs_i < 0.0:
                        rhs_i = 0.0
                    ratio = rhs_i / piv
                    if ratio < best:
                        best = ratio
            if best == INFINITY:
                return UNBOUNDED, iters

        tie_hi = best + _TIE_REL * (1.0 + best)
        leave = -1
        if bland:
            for i in range(r):
                piv = T[i, enter]
                if piv > floor_use:
                    rhs_i = T[i, rhs_col]
                    if rhs_i < 0.0:
                        rhs_i = 0.0
                    if rhs_i / piv <= tie_hi:
                        if leave == -1 or basis[i] < basis[leave]:
                            leave = i
        else:
            for i in range(r):
                piv = T[i, enter]
                if piv > floor_use:
                    rhs_i = T[i, rhs_col]
                    if rhs_i < 0.0:
                        rhs_i = 0.0
                    if rhs_i / piv <= tie_hi:
                        if leave == -1 or piv > T[leave, enter]:
                            leave = i

        # pivot
        piv = T[leave, enter]
        for j in range(ncols):
            T[leave, j] /= piv
        for i in range(r + 1):
            if i == leave:
                continue
            f = T[i, enter]
            if f != 0.0:
                for j in range(ncols):
                    T[i, j] -= f * T[leave, j]
        for i in range(r + 1):
            T[i, enter] = 0.0
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
