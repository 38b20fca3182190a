"""Bandlimited trigonometric series: representation, projection, synthesis.

A series of bandwidth ``L`` is parameterized by ``2L+1`` real numbers
(dc, L cosine amplitudes, L sine amplitudes), which is the real-valued
equivalent of the conjugate-symmetric complex coefficients ``a[-L..L]``:

    cos_coeffs[k-1] =  2 Re a[k]
    sin_coeffs[k-1] = -2 Im a[k]        for k = 1..L

All sampled signals live on the uniform grid t_j = j/n, j = 0..n-1; the
point t = 1 is omitted because periodicity makes it a duplicate of t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FourierSeries",
    "SampledSignal",
    "SmoothnessParams",
    "RankDeficientError",
    "evaluate",
    "project",
    "sample",
    "synth_power_law",
    "check_decay",
    "grid_times",
    "trig_basis",
    "harmonic_magnitudes",
]


class RankDeficientError(ValueError):
    """Requested bandwidth exceeds what the sample grid can resolve."""


def _frozen(a) -> np.ndarray:
    # always copy: freezing a caller-owned array in place would be a
    # surprising side effect
    out = np.array(a, dtype=float, order="C", copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FourierSeries:
    """Real-parameterized bandlimited series with harmonics 1..L plus dc."""

    bandwidth: int
    dc: float
    cos_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sin_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "cos_coeffs", _frozen(self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", _frozen(self.sin_coeffs))
        if self.bandwidth < 0:
            raise ValueError("bandwidth must be nonnegative")
        if len(self.cos_coeffs) != self.bandwidth or len(self.sin_coeffs) != self.bandwidth:
            raise ValueError(
                f"coefficient arrays must have length {self.bandwidth}, got "
                f"{len(self.cos_coeffs)}/{len(self.sin_coeffs)}"
            )
        if not np.isfinite(self.dc) or not np.all(np.isfinite(self.cos_coeffs)) \
                or not np.all(np.isfinite(self.sin_coeffs)):
            raise ValueError("coefficients must be finite")

    def coeff_vector(self) -> np.ndarray:
        """Stacked parameter vector [dc, cos_1..cos_L, sin_1..sin_L]."""
        return np.concatenate(([self.dc], self.cos_coeffs, self.sin_coeffs))

    @classmethod
    def from_coeff_vector(cls, x, bandwidth: int) -> "FourierSeries":
        x = np.asarray(x, dtype=float)
        if len(x) != 2 * bandwidth + 1:
            raise ValueError("coefficient vector has wrong length")
        return cls(bandwidth, float(x[0]), x[1 : bandwidth + 1], x[bandwidth + 1 :])

    def with_dc(self, dc: float) -> "FourierSeries":
        return FourierSeries(self.bandwidth, float(dc), self.cos_coeffs, self.sin_coeffs)


@dataclass(frozen=True)
class SampledSignal:
    """Real time-series on the uniform periodic grid t_j = j/n."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.ndim != 1 or len(self.values) < 1:
            raise ValueError("values must be a nonempty 1-D array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")

    @property
    def n(self) -> int:
        return len(self.values)

    def times(self) -> np.ndarray:
        return grid_times(self.n)


@dataclass(frozen=True)
class SmoothnessParams:
    """Constants (C, p, eps) of the polynomial coefficient-decay class.

    The p-times-differentiable regime has p >= 1; smaller positive p is
    accepted so the same container can express raw decay exponents.
    """

    C: float
    p: float
    eps: float = 0.0

    def __post_init__(self):
        if not (self.C > 0):
            raise ValueError("C must be positive")
        if not (self.p > 0):
            raise ValueError("p must be positive")
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")


def grid_times(n: int) -> np.ndarray:
    """Uniform grid {0, 1/n, ..., (n-1)/n}."""
    return np.arange(n, dtype=float) / n


def trig_basis(t, L: int) -> np.ndarray:
    """Design matrix with columns [1, cos(2*pi*k*t), sin(2*pi*k*t)], k=1..L.

    Rows correspond to the evaluation points ``t``; the column order matches
    :meth:`FourierSeries.coeff_vector`.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = np.arange(1, L + 1)
    ang = 2.0 * np.pi * np.outer(t, k)
    return np.hstack([np.ones((len(t), 1)), np.cos(ang), np.sin(ang)])


def evaluate(series: FourierSeries, t: float) -> float:
    """Value of the series at ``t`` (1-periodic; any real ``t`` accepted)."""
    row = trig_basis(t, series.bandwidth)
    return float((row @ series.coeff_vector())[0])


def sample(series: FourierSeries, n: int) -> SampledSignal:
    """Evaluate the series on the uniform ``n``-point grid."""
    if n < 1:
        raise ValueError("n must be >= 1")
    values = trig_basis(grid_times(n), series.bandwidth) @ series.coeff_vector()
    return SampledSignal(values)


def project(signal: SampledSignal, L: int) -> FourierSeries:
    """Discrete orthogonal projection onto the span of harmonics 0..L.

    Computed with the rectangle-rule inner products on the sample grid:

        dc           = (1/n) sum_j f(t_j)
        cos_coeffs_k = (2/n) sum_j f(t_j) cos(2 pi k t_j)
        sin_coeffs_k = (2/n) sum_j f(t_j) sin(2 pi k t_j)

    For 2L+1 <= n this equals the least-squares fit of a bandwidth-L series
    to the samples.

    Raises
    ------
    RankDeficientError
        If 2L+1 > n, where the coefficients are underdetermined.
    """
    n = signal.n
    if 2 * L + 1 > n:
        raise RankDeficientError(f"projection needs 2L+1 <= n, got L={L}, n={n}")
    phi = trig_basis(signal.times(), L)
    inner = phi.T @ signal.values / n
    dc = inner[0]
    return FourierSeries(L, float(dc), 2.0 * inner[1 : L + 1], 2.0 * inner[L + 1 :])


def harmonic_magnitudes(series: FourierSeries) -> np.ndarray:
    """|a[k]| for k = 1..L in the complex-coefficient convention."""
    return 0.5 * np.hypot(series.cos_coeffs, series.sin_coeffs)


def synth_power_law(
    params: SmoothnessParams,
    tail_mode: str,
    K_max: int,
    seed: int,
) -> FourierSeries:
    """Generate a power-law-decay series with |a[k]| = C / k**p, k = 1..K_max.

    ``tail_mode`` selects the coefficient structure:

    * ``"nonneg_symmetric"`` - a[k] real and nonnegative (cos_coeffs[k] =
      2C/k**p, sin_coeffs = 0), the class for which the dc-shifted envelope
      achieves the optimal L1 cost exactly.
    * ``"signed"`` - each a[k] gets a seeded pseudo-random phase, preserving
      the magnitudes.

    The dc value is drawn uniformly from [0, 1) from the same seed, so equal
    seeds give identical series.
    """
    if K_max < 1:
        raise ValueError("K_max must be >= 1")
    if tail_mode not in ("signed", "nonneg_symmetric"):
        raise ValueError(f"unknown tail_mode {tail_mode!r}")
    rng = np.random.default_rng(seed)
    dc = float(rng.uniform(0.0, 1.0))
    k = np.arange(1, K_max + 1, dtype=float)
    mag = params.C / k**params.p
    if tail_mode == "nonneg_symmetric":
        cos_c = 2.0 * mag
        sin_c = np.zeros(K_max)
    else:
        phase = rng.uniform(0.0, 2.0 * np.pi, size=K_max)
        cos_c = 2.0 * mag * np.cos(phase)
        sin_c = -2.0 * mag * np.sin(phase)
    return FourierSeries(K_max, dc, cos_c, sin_c)


def check_decay(series: FourierSeries, params: SmoothnessParams) -> bool:
    """True iff |a[k]| <= C / k**(p+1+eps) for every harmonic of the series."""
    if series.bandwidth == 0:
        return True
    k = np.arange(1, series.bandwidth + 1, dtype=float)
    limit = params.C / k ** (params.p + 1.0 + params.eps)
    return bool(np.all(harmonic_magnitudes(series) <= limit + 1e-15))
