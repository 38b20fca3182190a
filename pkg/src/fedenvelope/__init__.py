"""Overpredictive bandlimited envelope approximation and federated analytics.

Submodules mirror the pipeline stages: ``signal`` (series representation
and synthesis), ``solver`` (dense LP/QP), ``envelope`` (the approximation
schemes), ``analytics`` (server-side metrics), ``bounds`` (closed-form
bounds and their verification), ``fedsim`` (client/server experiments),
``ingest`` (dataset loading) and ``cli``.
"""

__version__ = "0.1.0"

from .analytics import (
    EmpiricalCdf,
    ViolationStats,
    aggregate_sum,
    comm_cost_bytes,
    empirical_cdf,
    quantile,
    rms_relative,
    violation_stats,
    wasserstein_1d,
)
from .envelope import (
    ConstraintGrid,
    EnvelopeScheme,
    EnvelopeSolution,
    envelope_l1,
    envelope_l2,
    mse_baseline,
    naive_envelope,
    sa_costs,
    tail_energy,
)
from .signal import (
    FourierSeries,
    SampledSignal,
    SmoothnessParams,
    check_decay,
    evaluate,
    project,
    sample,
    synth_power_law,
)
from .solver import (
    LinearConstraints,
    SolverReport,
    SolverTolerances,
    SolveStatus,
    solve_lp,
    solve_qp_identity,
)

__all__ = [
    "__version__",
    "EmpiricalCdf",
    "ViolationStats",
    "aggregate_sum",
    "comm_cost_bytes",
    "empirical_cdf",
    "quantile",
    "rms_relative",
    "violation_stats",
    "wasserstein_1d",
    "ConstraintGrid",
    "EnvelopeScheme",
    "EnvelopeSolution",
    "envelope_l1",
    "envelope_l2",
    "mse_baseline",
    "naive_envelope",
    "sa_costs",
    "tail_energy",
    "FourierSeries",
    "SampledSignal",
    "SmoothnessParams",
    "check_decay",
    "evaluate",
    "project",
    "sample",
    "synth_power_law",
    "LinearConstraints",
    "SolverReport",
    "SolverTolerances",
    "SolveStatus",
    "solve_lp",
    "solve_qp_identity",
]
