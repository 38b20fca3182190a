"""Server-side aggregation and error metrics.

Everything here operates on reconstructed sample values or coefficient
vectors received from clients: coefficient-wise aggregation, the empirical
(Glivenko-Cantelli) CDF with left-continuous-inverse quantiles, the exact
1-D Wasserstein distance between empirical distributions, envelope
violation statistics, relative RMS error, and the communication price of a
bandwidth choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .signal import FourierSeries, SampledSignal

__all__ = [
    "EmpiricalCdf",
    "ViolationStats",
    "aggregate_sum",
    "empirical_cdf",
    "quantile",
    "wasserstein_1d",
    "violation_stats",
    "rms_relative",
    "comm_cost_bytes",
]

BYTES_PER_COEFF = 4  # 32-bit float per communicated coefficient


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous step CDF of a finite sample."""

    sorted_samples: np.ndarray

    def __post_init__(self):
        s = np.sort(np.asarray(self.sorted_samples, dtype=float).ravel())
        if len(s) < 1:
            raise ValueError("empirical CDF needs at least one sample")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "sorted_samples", s)

    @property
    def size(self) -> int:
        return len(self.sorted_samples)

    def __call__(self, x) -> np.ndarray | float:
        """F(x) = (#samples <= x) / N."""
        pos = np.searchsorted(self.sorted_samples, x, side="right")
        out = pos / self.size
        return float(out) if np.isscalar(x) else out


@dataclass(frozen=True)
class ViolationStats:
    count: int
    percent: float
    peak_error: float


def empirical_cdf(samples) -> EmpiricalCdf:
    return EmpiricalCdf(np.asarray(samples, dtype=float))


def quantile(cdf: EmpiricalCdf, q: float) -> float:
    """Left-continuous inverse: the smallest sample s with F(s) >= q."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly between 0 and 1")
    k = math.ceil(q * cdf.size) - 1
    return float(cdf.sorted_samples[max(k, 0)])


def wasserstein_1d(a: EmpiricalCdf, b: EmpiricalCdf) -> float:
    """Exact integral of |Qa(z) - Qb(z)| over z in (0, 1).

    Both empirical quantile functions are piecewise constant with
    breakpoints at {i/Na} and {j/Nb}; the integral is summed over the
    merged breakpoint grid.  For Na == Nb this reduces to the mean absolute
    difference of the sorted samples.
    """
    na, nb = a.size, b.size
    breaks = np.union1d(np.arange(1, na + 1) / na, np.arange(1, nb + 1) / nb)
    widths = np.diff(np.concatenate(([0.0], breaks)))
    mids = breaks - widths / 2.0
    ia = np.minimum((np.ceil(mids * na) - 1).astype(int), na - 1)
    ib = np.minimum((np.ceil(mids * nb) - 1).astype(int), nb - 1)
    return float(np.sum(widths * np.abs(a.sorted_samples[ia] - b.sorted_samples[ib])))


def aggregate_sum(envelopes: Sequence[FourierSeries]) -> FourierSeries:
    """Coefficient-wise sum of client series sharing one bandwidth."""
    if not envelopes:
        raise ValueError("nothing to aggregate")
    L = envelopes[0].bandwidth
    if any(e.bandwidth != L for e in envelopes):
        raise ValueError("all series must share the same bandwidth")
    dc = sum(e.dc for e in envelopes)
    cos_c = np.sum([e.cos_coeffs for e in envelopes], axis=0)
    sin_c = np.sum([e.sin_coeffs for e in envelopes], axis=0)
    return FourierSeries(L, float(dc), cos_c, sin_c)


def violation_stats(env_sum: SampledSignal, true_sum: SampledSignal) -> ViolationStats:
    """Count and size of envelope-constraint violations on the sample grid.

    A point violates when the envelope falls below the true value by more
    than 1e-6 * (1 + ||true||_inf); the tolerance is relative because the
    dataset magnitudes are in the thousands of watt-hours.
    """
    if env_sum.n != true_sum.n:
        raise ValueError("signals must have equal length")
    tol = 1e-6 * (1.0 + float(np.abs(true_sum.values).max()))
    gap = true_sum.values - env_sum.values
    count = int(np.sum(gap > tol))
    peak = float(max(0.0, gap.max())) if count > 0 else 0.0
    return ViolationStats(count, 100.0 * count / true_sum.n, peak)


def rms_relative(approx: SampledSignal, truth: SampledSignal) -> float:
    """||approx - truth||_2 / ||truth||_2 on the shared sample grid."""
    if approx.n != truth.n:
        raise ValueError("signals must have equal length")
    denom = float(np.linalg.norm(truth.values))
    if denom == 0.0:
        raise ValueError("truth signal has zero norm")
    return float(np.linalg.norm(approx.values - truth.values) / denom)


def comm_cost_bytes(L: int, clients: int) -> int:
    """Bytes on the wire: (2L+1) coefficients x 4 bytes per client."""
    if L < 0 or clients < 1:
        raise ValueError("need L >= 0 and clients >= 1")
    return clients * (2 * L + 1) * BYTES_PER_COEFF
