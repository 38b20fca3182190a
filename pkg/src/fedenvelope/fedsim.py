"""Federated simulation: per-client envelope fits, aggregation, experiments.

One round works exactly like the client/server protocol: every client fits
a bandwidth-L envelope to its own signal (independently solvable, order
preserved), "communicates" the 2L+1 coefficients, and the server
reconstructs, aggregates and computes the analytics of interest.  The two
experiment drivers sweep the bandwidth (communication/accuracy tradeoff)
and the constraint subsampling rate.

Rows whose configuration is rank deficient (2L+1 exceeding the active
constraint count) or whose solver failed are retained with their status,
since those regimes are findings in their own right; their metric fields
stay empty.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analytics import (
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
    rank_deficient_solution,
)
from .signal import FourierSeries, SampledSignal, sample
from .solver import SolveStatus

__all__ = [
    "ClientRecord",
    "ExperimentConfig",
    "MetricsRow",
    "max_full_rank_bandwidth",
    "run_clients",
    "server_analytics",
    "experiment_tradeoff",
    "experiment_subsampling",
    "rows_to_csv",
    "rows_to_json_records",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("L", "S", "scheme", "status", "rms_rel", "wasserstein", "viol_count",
               "viol_pct", "peak_err", "q10", "q50", "q90", "comm_bytes")

POOLED_CDF = "pooled"
SUM_SIGNAL = "sum"


@dataclass(frozen=True)
class ClientRecord:
    client_id: str
    signal: SampledSignal


@dataclass(frozen=True)
class ExperimentConfig:
    cost: str = "l1"  # "l1" | "l2"
    L_values: tuple = (1,)
    subsample_S: tuple = (1,)
    n: int = 720
    scheme_set: tuple = (EnvelopeScheme.L1Opt,)
    seed: int = 0
    analytics_target: str = POOLED_CDF

    def __post_init__(self):
        if not self.L_values:
            raise ValueError("L_values must be nonempty")
        if any(L < 0 for L in self.L_values) or any(S < 1 for S in self.subsample_S):
            raise ValueError("need L >= 0 and S >= 1")
        if self.analytics_target not in (POOLED_CDF, SUM_SIGNAL):
            raise ValueError("analytics_target must be 'pooled' or 'sum'")


@dataclass(frozen=True)
class MetricsRow:
    L: int
    S: int
    scheme: str
    status: str
    rms_rel: float | None = None
    wasserstein: float | None = None
    viol_count: int | None = None
    viol_pct: float | None = None
    peak_err: float | None = None
    q10: float | None = None
    q50: float | None = None
    q90: float | None = None
    comm_bytes: int | None = None

    def as_record(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


def max_full_rank_bandwidth(n: int) -> int:
    """Largest L with 2L+1 <= n, the full-communication endpoint."""
    return (n - 1) // 2


def _solve_one(signal: SampledSignal, L: int, S: int, scheme: EnvelopeScheme) -> EnvelopeSolution:
    grid = ConstraintGrid(signal.n, S)
    if scheme is EnvelopeScheme.L1Opt:
        return envelope_l1(signal, L, grid)
    if scheme is EnvelopeScheme.L2Opt:
        return envelope_l2(signal, L, grid)
    if scheme is EnvelopeScheme.Naive:
        return naive_envelope(signal, L)
    if scheme is EnvelopeScheme.MseBaseline:
        return mse_baseline(signal, L)
    raise ValueError(f"unknown scheme {scheme}")


def run_clients(clients: Sequence[ClientRecord], L: int, S: int,
                scheme: EnvelopeScheme) -> list[EnvelopeSolution]:
    """Independent per-client envelope fits; output order matches input.

    The row-level rank contract applies to every scheme: when 2L+1 exceeds
    the active constraint count ceil(n/S) the whole row is rank deficient.
    """
    if not clients:
        raise ValueError("no clients")
    n = clients[0].signal.n
    if any(c.signal.n != n for c in clients):
        raise ValueError("all client signals must share the same length")
    grid = ConstraintGrid(n, S)
    if 2 * L + 1 > grid.active_count:
        return [rank_deficient_solution(L, scheme) for _ in clients]
    return [_solve_one(c.signal, L, S, scheme) for c in clients]


def _failed_row(L, S, scheme, status) -> MetricsRow:
    return MetricsRow(L, S, scheme.value, status.name)


def server_analytics(solutions: Sequence[EnvelopeSolution],
                     clients: Sequence[ClientRecord],
                     config: ExperimentConfig, L: int, S: int) -> MetricsRow:
    """Reconstruct, aggregate, and fill every metric field for one row."""
    scheme = solutions[0].scheme
    bad = next((s for s in solutions if not s.ok), None)
    if bad is not None:
        return _failed_row(L, S, scheme, bad.status)

    n = clients[0].signal.n
    true_matrix = np.stack([c.signal.values for c in clients])
    true_sum = SampledSignal(true_matrix.sum(axis=0))

    agg: FourierSeries = aggregate_sum([s.coeffs for s in solutions])
    env_matrix = np.stack([sample(s.coeffs, n).values for s in solutions])
    env_sum = SampledSignal(sample(agg, n).values)

    if config.analytics_target == POOLED_CDF:
        cdf_true = empirical_cdf(true_matrix.ravel())
        cdf_env = empirical_cdf(env_matrix.ravel())
    else:
        cdf_true = empirical_cdf(true_sum.values)
        cdf_env = empirical_cdf(env_sum.values)

    viol = violation_stats(env_sum, true_sum)
    return MetricsRow(
        L=L,
        S=S,
        scheme=scheme.value,
        status=SolveStatus.Optimal.name,
        rms_rel=rms_relative(env_sum, true_sum),
        wasserstein=wasserstein_1d(cdf_env, cdf_true),
        viol_count=viol.count,
        viol_pct=viol.percent,
        peak_err=viol.peak_error,
        q10=quantile(cdf_env, 0.10),
        q50=quantile(cdf_env, 0.50),
        q90=quantile(cdf_env, 0.90),
        comm_bytes=comm_cost_bytes(L, len(clients)),
    )


def _clamp_L(L: int, n: int) -> int:
    return min(L, max_full_rank_bandwidth(n))


def experiment_tradeoff(clients: Sequence[ClientRecord],
                        config: ExperimentConfig) -> list[MetricsRow]:
    """Communication/accuracy sweep over L at S=1, rows sorted by L."""
    if tuple(config.subsample_S) != (1,):
        raise ValueError("tradeoff experiment runs at S=1")
    n = clients[0].signal.n
    rows = []
    for L in sorted({_clamp_L(L, n) for L in config.L_values}):
        for scheme in config.scheme_set:
            sols = run_clients(clients, L, 1, scheme)
            rows.append(server_analytics(sols, clients, config, L, 1))
    return rows


def experiment_subsampling(clients: Sequence[ClientRecord],
                           config: ExperimentConfig) -> list[MetricsRow]:
    """Metrics over the (L, S) grid; rank-deficient cells keep their status."""
    rows = []
    for S in config.subsample_S:
        for L in config.L_values:
            for scheme in config.scheme_set:
                sols = run_clients(clients, L, S, scheme)
                rows.append(server_analytics(sols, clients, config, L, S))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.12g}"


def rows_to_csv(rows: Sequence[MetricsRow]) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        rec = row.as_record()
        buf.write(",".join(_fmt(rec[k]) for k in CSV_COLUMNS) + "\n")
    return buf.getvalue()


def rows_to_json_records(rows: Sequence[MetricsRow]) -> str:
    return json.dumps([row.as_record() for row in rows], sort_keys=True, indent=2)
