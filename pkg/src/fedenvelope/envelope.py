"""Overpredictive envelope approximation of sampled signals.

Four schemes are provided, all returning a bandwidth-L series:

* ``envelope_l1``  - minimize the dc gap (an LP) subject to the envelope
  constraint on the grid, then pick the minimum-coefficient-distance point
  of the optimal face for determinism.
* ``envelope_l2``  - minimize the squared coefficient distance to the
  orthogonal projection (a QP) subject to the envelope constraint.
* ``naive_envelope`` - the projection shifted up by the peak residual.
* ``mse_baseline`` - the unconstrained projection (no envelope guarantee).

Costs are reported in the function-space convention: ``sa1`` is the dc gap
(which equals the L1 distance for overpredicting approximations) and
``sa2`` is the head coefficient error plus the tail energy of the
projection residual.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .signal import FourierSeries, SampledSignal, project, trig_basis
from .solver import (
    LinearConstraints,
    SolverTolerances,
    SolveStatus,
    solve_lp,
    solve_qp_identity,
)

__all__ = [
    "ConstraintGrid",
    "EnvelopeScheme",
    "EnvelopeSolution",
    "envelope_l1",
    "envelope_l2",
    "naive_envelope",
    "mse_baseline",
    "sa_costs",
    "tail_energy",
    "rank_deficient_solution",
]

# dc ceiling slack used when refining the L1 optimal face
_L1_TIE_SLACK = 1e-9


class EnvelopeScheme(enum.Enum):
    L1Opt = "l1opt"
    L2Opt = "l2opt"
    Naive = "naive"
    MseBaseline = "mse"


@dataclass(frozen=True)
class ConstraintGrid:
    """Envelope constraints enforced at indices {0, S, 2S, ...} of an n-grid."""

    n: int
    stride: int = 1

    def __post_init__(self):
        if self.n < 1 or self.stride < 1:
            raise ValueError("n and stride must be positive")

    def active_indices(self) -> np.ndarray:
        return np.arange(0, self.n, self.stride)

    @property
    def active_count(self) -> int:
        return -(-self.n // self.stride)  # ceil(n / stride)


@dataclass(frozen=True)
class EnvelopeSolution:
    coeffs: FourierSeries
    scheme: EnvelopeScheme
    sa1: float
    sa2: float
    status: SolveStatus
    max_violation_on_grid: float

    @property
    def ok(self) -> bool:
        return self.status is SolveStatus.Optimal


def tail_energy(signal: SampledSignal, L: int) -> float:
    """Out-of-band energy: mean-square residual of the bandwidth-L projection.

    By the discrete Parseval identity this equals the sample mean square of
    the signal minus the head energy of its projection, and stands in for
    ``sum_{|k|>L} |a[k]|^2`` when only samples are available.
    """
    proj = project(signal, L)
    resid = signal.values - trig_basis(signal.times(), L) @ proj.coeff_vector()
    return float(np.mean(resid**2))


def _head_cost(b: FourierSeries, a: FourierSeries) -> float:
    """sum_{|k|<=L} |b[k]-a[k]|^2 in the real parameterization."""
    return float(
        (b.dc - a.dc) ** 2
        + 0.5 * np.sum((b.cos_coeffs - a.cos_coeffs) ** 2)
        + 0.5 * np.sum((b.sin_coeffs - a.sin_coeffs) ** 2)
    )


def sa_costs(signal: SampledSignal, solution: EnvelopeSolution, L: int):
    """(sa1, sa2) of a solution against the bandwidth-L projection."""
    if solution.coeffs.bandwidth != L:
        raise ValueError("solution bandwidth does not match L")
    proj = project(signal, L)
    sa1 = solution.coeffs.dc - proj.dc
    sa2 = _head_cost(solution.coeffs, proj) + tail_energy(signal, L)
    return float(sa1), float(sa2)


def _feasibility_scale(values: np.ndarray) -> float:
    return 1.0 + float(np.abs(values).max(initial=0.0))


def _grid_violation(values, phi, coeff_vec) -> float:
    return max(0.0, float((values - phi @ coeff_vec).max()))


def rank_deficient_solution(L: int, scheme: EnvelopeScheme) -> EnvelopeSolution:
    zero = FourierSeries(L, 0.0, np.zeros(L), np.zeros(L))
    return EnvelopeSolution(zero, scheme, math.nan, math.nan,
                            SolveStatus.RankDeficient, math.nan)


def _failed(L, scheme, status) -> EnvelopeSolution:
    zero = FourierSeries(L, 0.0, np.zeros(L), np.zeros(L))
    return EnvelopeSolution(zero, scheme, math.nan, math.nan, status, math.nan)


def envelope_l1(signal: SampledSignal, L: int, grid: ConstraintGrid | None = None,
                tolerances: SolverTolerances | None = None) -> EnvelopeSolution:
    """dc-gap-optimal envelope over the active constraint grid.

    Solves ``min b[0] - a[0]`` s.t. ``b(t_j) >= f(t_j)`` on the grid.  The
    LP objective only touches the dc coefficient, so the optimal face can be
    high-dimensional; among its points the one nearest the projection (in
    the plain coefficient metric) is returned, found by re-solving the
    projection QP with the dc capped at the LP optimum.
    """
    grid = grid or ConstraintGrid(signal.n)
    scheme = EnvelopeScheme.L1Opt
    if 2 * L + 1 > grid.active_count:
        return rank_deficient_solution(L, scheme)
    tols = tolerances or SolverTolerances()

    proj = project(signal, L)
    a_vec = proj.coeff_vector()
    idx = grid.active_indices()
    t_active = idx / grid.n
    phi = trig_basis(t_active, L)
    f_active = signal.values[idx]
    scale = _feasibility_scale(signal.values)

    # The projection preserves the sample mean on the full grid, so if it
    # is already feasible there its residual is identically ~0 and it is
    # the exact optimum with zero cost.
    if grid.stride == 1:
        resid = signal.values - trig_basis(signal.times(), L) @ a_vec
        if np.abs(resid).max() <= 1e-12 * scale:
            return EnvelopeSolution(proj, scheme, 0.0,
                                    tail_energy(signal, L),
                                    SolveStatus.Optimal,
                                    _grid_violation(f_active, phi, a_vec))

    c = np.zeros(2 * L + 1)
    c[0] = 1.0
    lp = solve_lp(c, LinearConstraints(phi, f_active), tols)
    if lp.status is not SolveStatus.Optimal:
        return _failed(L, scheme, lp.status)
    sa1 = float(lp.x[0] - a_vec[0])

    # refine: nearest-to-projection point of the LP-optimal face
    cap_row = np.zeros(2 * L + 1)
    cap_row[0] = -1.0
    A_ref = np.vstack([phi, cap_row])
    g_ref = np.concatenate([f_active, [-(lp.x[0] + _L1_TIE_SLACK)]])
    qp = solve_qp_identity(a_vec, LinearConstraints(A_ref, g_ref), tols)
    x = qp.x if qp.status is SolveStatus.Optimal else lp.x

    coeffs = FourierSeries.from_coeff_vector(x, L)
    sa2 = _head_cost(coeffs, proj) + tail_energy(signal, L)
    return EnvelopeSolution(coeffs, scheme, sa1, sa2, SolveStatus.Optimal,
                            _grid_violation(f_active, phi, x))


def envelope_l2(signal: SampledSignal, L: int, grid: ConstraintGrid | None = None,
                tolerances: SolverTolerances | None = None) -> EnvelopeSolution:
    """Head-cost-optimal envelope over the active constraint grid.

    Minimizes ``sum_{|k|<=L} |b[k]-a[k]|^2``, which in the real
    parameterization weights the dc difference by 1 and each harmonic
    difference by 1/2; the problem is mapped onto the identity-Hessian
    projection QP by rescaling the harmonic coordinates with sqrt(2).
    """
    grid = grid or ConstraintGrid(signal.n)
    scheme = EnvelopeScheme.L2Opt
    if 2 * L + 1 > grid.active_count:
        return rank_deficient_solution(L, scheme)
    tols = tolerances or SolverTolerances()

    proj = project(signal, L)
    a_vec = proj.coeff_vector()
    idx = grid.active_indices()
    phi = trig_basis(idx / grid.n, L)
    f_active = signal.values[idx]

    # u = W^{1/2} x with W = diag(1, 1/2, ..., 1/2)
    w_inv_sqrt = np.concatenate([[1.0], np.full(2 * L, np.sqrt(2.0))])
    qp = solve_qp_identity(
        a_vec / w_inv_sqrt,
        LinearConstraints(phi * w_inv_sqrt, f_active),
        tols,
    )
    if qp.status is not SolveStatus.Optimal:
        return _failed(L, scheme, qp.status)
    x = qp.x * w_inv_sqrt
    coeffs = FourierSeries.from_coeff_vector(x, L)
    head = qp.objective
    sa2 = head + tail_energy(signal, L)
    return EnvelopeSolution(coeffs, scheme, float(x[0] - a_vec[0]), sa2,
                            SolveStatus.Optimal, _grid_violation(f_active, phi, x))


def naive_envelope(signal: SampledSignal, L: int) -> EnvelopeSolution:
    """Projection shifted up by the peak residual on the full grid."""
    scheme = EnvelopeScheme.Naive
    if 2 * L + 1 > signal.n:
        return rank_deficient_solution(L, scheme)
    proj = project(signal, L)
    phi = trig_basis(signal.times(), L)
    resid = signal.values - phi @ proj.coeff_vector()
    c0 = float(resid.max())
    coeffs = proj.with_dc(proj.dc + c0)
    sa2 = c0 * c0 + tail_energy(signal, L)
    return EnvelopeSolution(coeffs, scheme, c0, sa2, SolveStatus.Optimal,
                            _grid_violation(signal.values, phi, coeffs.coeff_vector()))


def mse_baseline(signal: SampledSignal, L: int) -> EnvelopeSolution:
    """Unconstrained projection; violations are reported, not prevented."""
    scheme = EnvelopeScheme.MseBaseline
    if 2 * L + 1 > signal.n:
        return rank_deficient_solution(L, scheme)
    proj = project(signal, L)
    phi = trig_basis(signal.times(), L)
    sa2 = tail_energy(signal, L)
    return EnvelopeSolution(proj, scheme, 0.0, sa2, SolveStatus.Optimal,
                            _grid_violation(signal.values, phi, proj.coeff_vector()))
