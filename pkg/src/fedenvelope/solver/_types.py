"""Shared solver types: constraints, status codes, reports, tolerances."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class SolveStatus(enum.Enum):
    Optimal = "optimal"
    RankDeficient = "rank_deficient"
    Unbounded = "unbounded"
    MaxIterations = "max_iterations"
    Infeasible = "infeasible"


@dataclass(frozen=True)
class LinearConstraints:
    """Inequality system ``A @ x >= g`` with a dense m-by-d matrix."""

    A: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        A = np.ascontiguousarray(np.asarray(self.A, dtype=float))
        g = np.ascontiguousarray(np.asarray(self.g, dtype=float)).ravel()
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise ValueError("A must be a nonempty 2-D matrix")
        if len(g) != A.shape[0]:
            raise ValueError("g length must match the number of rows of A")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(g))):
            raise ValueError("constraint entries must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "g", g)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class SolverTolerances:
    """Numerical tolerances; feasibility is scaled by (1 + ||g||_inf)."""

    feasibility: float = 1e-8
    optimality: float = 1e-7
    pivot: float = 1e-11
    iteration_factor: int = 50

    def max_iterations(self, d: int, m: int) -> int:
        return self.iteration_factor * (d + m)


@dataclass(frozen=True)
class SolverReport:
    x: np.ndarray
    status: SolveStatus
    objective: float
    max_constraint_violation: float
    kkt_residual: float
    iterations: int
