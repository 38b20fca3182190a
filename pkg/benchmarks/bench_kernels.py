"""Benchmark: compiled simplex pivot kernel vs the pure-numpy fallback.

Times the full envelope LP pipeline (dual-form two-phase simplex) on
representative problem sizes with each kernel, plus the raw pivot loop on
a fixed tableau.  Run from the repo root:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from fedenvelope.signal import (
    SampledSignal,
    SmoothnessParams,
    grid_times,
    sample,
    synth_power_law,
    trig_basis,
)
from fedenvelope.solver import LinearConstraints, SolverTolerances
from fedenvelope.solver import _simplex_c, _simplex_py  # type: ignore[attr-defined]
from fedenvelope.solver import _kernel, _lp


def _instances():
    cases = []
    for (p, L, K, n, label) in [
        (2.0, 5, 100, 512, "small  (d=11,  m=512)"),
        (2.0, 10, 200, 1600, "medium (d=21,  m=1600)"),
        (1.5, 20, 400, 3200, "large  (d=41,  m=3200)"),
        (2.0, 60, 240, 720, "wide   (d=121, m=720)"),
    ]:
        series = synth_power_law(SmoothnessParams(1.0, p), "signed", K, seed=17)
        values = sample(series, n).values
        sig = SampledSignal(values - values.min())
        phi = trig_basis(grid_times(n), L)
        c = np.zeros(2 * L + 1)
        c[0] = 1.0
        cases.append((label, c, LinearConstraints(phi, sig.values)))
    return cases


def bench_lane(kernel_module, cases, repeats=3):
    _kernel.run_pivots = kernel_module.run_pivots  # swap the selected kernel
    _lp.run_pivots = kernel_module.run_pivots
    tols = SolverTolerances()
    out = []
    for label, c, cons in cases:
        best = float("inf")
        iters = 0
        for _ in range(repeats):
            t0 = time.perf_counter()
            rep = _lp.solve_lp(c, cons, tols)
            best = min(best, time.perf_counter() - t0)
            iters = rep.iterations
            assert rep.status.name == "Optimal", (label, rep.status)
        out.append((label, best, iters))
    return out


def main():
    cases = _instances()
    compiled = bench_lane(_simplex_c, cases)
    fallback = bench_lane(_simplex_py, cases)
    print(f"{'instance':28s} {'compiled':>10s} {'numpy':>10s} {'speedup':>8s} {'pivots':>7s}")
    for (label, tc, it), (_, tp, _) in zip(compiled, fallback):
        print(f"{label:28s} {tc*1e3:9.2f}ms {tp*1e3:9.2f}ms {tp/tc:7.2f}x {it:7d}")


if __name__ == "__main__":
    main()
