"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Three checks (2a, 3b, 4) assert claims that the measured optima contradict
on the very signal classes they concern; they are implemented exactly as
stated and are expected to fail.  The repository README's "Known-failing
acceptance checks" section carries the analysis; everything else must
pass.
"""

import math
import os
import time

import numpy as np
import pytest

from fedenvelope.analytics import empirical_cdf, quantile, rms_relative
from fedenvelope.bounds import naive_c0_tail, ratio_bound, sa2_theory_bounds, verify_theorem2
from fedenvelope.envelope import (
    ConstraintGrid,
    EnvelopeScheme,
    envelope_l1,
    envelope_l2,
    naive_envelope,
    tail_energy,
)
from fedenvelope.signal import (
    SampledSignal,
    SmoothnessParams,
    grid_times,
    project,
    sample,
    synth_power_law,
    trig_basis,
)
from fedenvelope.solver import SolveStatus

from oracles import lp_vertex_enumeration, qp_weighted_projection_exhaustive

P_GRID = (1.5, 2.0, 3.0)


def report(criterion: str, ok: bool, detail: str):
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def power_law_signal(p, mode, K, n, seed):
    return sample(synth_power_law(SmoothnessParams(1.0, p), mode, K, seed), n)


def test_criterion_01_feasibility_suite():
    """100 seeded signals; every Optimal envelope feasible; < 60 s."""
    t0 = time.time()
    grid_cells = [(n, L) for n in (64, 128, 512) for L in (2, 5, 10)]
    worst = 0.0
    solved = 0
    for i in range(100):
        n, L = grid_cells[i % len(grid_cells)]
        p = P_GRID[i % 3]
        mode = "signed" if i % 2 == 0 else "nonneg_symmetric"
        sig = power_law_signal(p, mode, max(L + 1, n // 4), n, seed=9000 + i)
        tol = 1e-6 * (1.0 + np.abs(sig.values).max())
        for sol in (envelope_l1(sig, L), envelope_l2(sig, L), naive_envelope(sig, L)):
            assert sol.status is SolveStatus.Optimal, (i, n, L, sol.scheme, sol.status)
            rel = sol.max_violation_on_grid / tol
            worst = max(worst, rel)
            assert sol.max_violation_on_grid <= tol, (i, n, L, sol.scheme)
            solved += 1
    elapsed = time.time() - t0
    ok = worst <= 1.0 and elapsed < 60.0
    assert report("1 (feasibility suite)", ok,
                  f"{solved} envelopes, worst violation {worst:.2e} of budget, "
                  f"{elapsed:.1f}s")


def _theorem1_case2_instances():
    out = []
    L = 5
    for i in range(20):
        p = P_GRID[i % 3]
        K = 20 * L
        sig = power_law_signal(p, "nonneg_symmetric", K, 8 * K, seed=500 + i)
        out.append((p, L, K, sig))
    return out


def test_criterion_02a_theorem1ii_equality():
    """|SA1(L1Opt) - 2*sum_{k>L}a[k]| relative error <= 2e-2.

    Expected to fail: the dc-optimal envelope legitimately beats the
    claimed equality value (which equals the naive cost) by adjusting
    in-band coefficients; see README.
    """
    worst = 0.0
    for p, L, K, sig in _theorem1_case2_instances():
        sol = envelope_l1(sig, L, ConstraintGrid(sig.n))
        assert sol.status is SolveStatus.Optimal
        oracle = naive_c0_tail(1.0, p, L, K)
        worst = max(worst, abs(sol.sa1 - oracle) / oracle)
    ok = worst <= 2e-2
    report("2a (Theorem 1(ii) equality)", ok, f"worst relative gap {worst:.3f}")
    assert ok, f"optimal SA1 is far below 2*sum tail (worst rel gap {worst:.3f})"


def test_criterion_02b_optimal_not_above_naive():
    """SA1(L1Opt) <= SA1(Naive) + 1e-9 on every trial."""
    worst = -np.inf
    for p, L, K, sig in _theorem1_case2_instances():
        opt = envelope_l1(sig, L, ConstraintGrid(sig.n))
        nai = naive_envelope(sig, L)
        worst = max(worst, opt.sa1 - nai.sa1)
    ok = worst <= 1e-9
    assert report("2b (optimal <= naive, L1)", ok, f"max SA1(opt)-SA1(naive) = {worst:.2e}")


def _theorem1_case1_ratios():
    rows = []
    for i in range(20):
        p = P_GRID[i % 3]
        L = (5, 10, 20)[(i // 7) % 3]
        K = 20 * L
        sig = power_law_signal(p, "signed", K, 8 * K, seed=800 + i)
        opt = envelope_l2(sig, L, ConstraintGrid(sig.n))
        nai = naive_envelope(sig, L)
        assert opt.status is SolveStatus.Optimal
        rows.append((p, L, nai.sa2 / opt.sa2))
    return rows


def test_criterion_03a_ratio_lower_bound():
    """SA2'/SA2 >= 1 - 1e-6 (optimality of the L2 envelope)."""
    rows = _theorem1_case1_ratios()
    worst = min(r for _, _, r in rows)
    ok = worst >= 1.0 - 1e-6
    assert report("3a (ratio lower bound)", ok, f"min ratio {worst:.6f}")


def test_criterion_03b_ratio_upper_bound():
    """SA2'/SA2 <= (1+1/L)^(2p-1) * 1.05.

    Expected to fail: the claimed cap on the naive cost drops its C0^2
    head term; measured ratios sit well above the bound; see README.
    """
    rows = _theorem1_case1_ratios()
    excess = [(p, L, r / (ratio_bound(p, L) * 1.05)) for p, L, r in rows]
    worst = max(e for _, _, e in excess)
    ok = worst <= 1.0
    report("3b (Theorem 1(i) ratio upper bound)", ok,
           f"worst ratio/bound = {worst:.2f}")
    assert ok, f"measured ratios exceed the bound by up to {worst:.2f}x"


def test_criterion_04_appendix_a_bracket():
    """Naive SA2 within [0.95*lower, 1.05*upper] of the head/tail bracket.

    Expected to fail: the bracket provably contains the projection tail
    energy, while the naive cost adds C0^2 >= tail on top; see README.
    """
    worst_low = worst_high = 0.0
    for i, (p, L) in enumerate((p, L) for p in P_GRID for L in (5, 10, 20)):
        K = 20 * L
        sig = power_law_signal(p, "nonneg_symmetric", K, 8 * K, seed=300 + i)
        nai = naive_envelope(sig, L)
        lower, upper = sa2_theory_bounds(p, L)
        worst_low = max(worst_low, (0.95 * lower) / nai.sa2)
        worst_high = max(worst_high, nai.sa2 / (1.05 * upper))
    ok = worst_low <= 1.0 and worst_high <= 1.0
    report("4 (Appendix A bracket)", ok,
           f"bracket exceedance: low x{worst_low:.2f}, high x{worst_high:.2f}")
    assert ok, f"naive SA2 exceeds the bracket by up to {worst_high:.1f}x"


def test_criterion_05_theorem2_cdf_gap():
    """50 trials: CDF gap within bound, envelope CDF dominated within 1/N."""
    reports = [verify_theorem2(25, p, [5, 10, 20], None, seed=int(1000 * p))
               for p in (1.5, 2.0)]
    violations = [v for rep in reports for v in rep.violations]
    n_checks = sum(len(rep.records) for rep in reports)
    ok = not violations
    assert report("5 (Theorem 2 CDF gap + dominance)", ok,
                  f"{n_checks} checks over 50 trials, {len(violations)} violations")


def test_criterion_06_small_instance_oracles():
    """L2Opt matches exhaustive projection, L1Opt matches vertex LP."""
    rng = np.random.default_rng(123)
    worst_coeff = worst_obj = 0.0
    cases = 0
    for _ in range(60):
        L = int(rng.integers(0, 3))         # d = 2L+1 <= 5
        n = int(rng.integers(2 * L + 1, 9))  # m <= 8
        sig = SampledSignal(rng.normal(size=n))
        grid = ConstraintGrid(n)
        phi = trig_basis(grid_times(n), L)
        a = project(sig, L).coeff_vector()
        w = np.concatenate([[1.0], 0.5 * np.ones(2 * L)])

        l2 = envelope_l2(sig, L, grid)
        oracle_x = qp_weighted_projection_exhaustive(a, w, phi, sig.values)
        assert l2.status is SolveStatus.Optimal and oracle_x is not None
        worst_coeff = max(worst_coeff,
                          float(np.abs(l2.coeffs.coeff_vector() - oracle_x).max()))

        l1 = envelope_l1(sig, L, grid)
        c = np.zeros(2 * L + 1)
        c[0] = 1.0
        oracle_lp = lp_vertex_enumeration(c, phi, sig.values)
        assert l1.status is SolveStatus.Optimal and oracle_lp is not None
        worst_obj = max(worst_obj, abs((l1.sa1 + a[0]) - oracle_lp[0]))
        cases += 1
    ok = worst_coeff <= 1e-8 and worst_obj <= 1e-9
    assert report("6 (small-instance oracles)", ok,
                  f"{cases} instances, coeff err {worst_coeff:.1e}, "
                  f"objective err {worst_obj:.1e}")


def test_criterion_07_monotonicity_and_zero_error_endpoint():
    """RMS nonincreasing in L at n=720 and ~0 at L=359; head cost
    nonincreasing in S."""
    n = 720
    sig = power_law_signal(2.0, "nonneg_symmetric", 300, n, seed=77)
    L_grid = (1, 5, 30, 120, 359)
    rms = {"l1": [], "l2": []}
    for L in L_grid:
        sol1 = envelope_l1(sig, L, ConstraintGrid(n))
        sol2 = envelope_l2(sig, L, ConstraintGrid(n))
        assert sol1.status is SolveStatus.Optimal
        assert sol2.status is SolveStatus.Optimal
        rms["l1"].append(rms_relative(sample(sol1.coeffs, n), sig))
        rms["l2"].append(rms_relative(sample(sol2.coeffs, n), sig))
    mono = all(b <= a + 1e-9 for series in rms.values()
               for a, b in zip(series, series[1:]))
    endpoint = max(rms["l1"][-1], rms["l2"][-1])

    heads = []
    for S in (1, 2, 4, 8):
        sol = envelope_l2(sig, 10, ConstraintGrid(n, S))
        heads.append(sol.sa2 - tail_energy(sig, 10))
    sub_mono = all(b <= a + 1e-9 for a, b in zip(heads, heads[1:]))

    ok = mono and endpoint <= 1e-6 and sub_mono
    assert report("7 (monotonicity + zero-error endpoint)", ok,
                  f"monotone={mono}, rms(L=359)={endpoint:.1e}, "
                  f"S-monotone={sub_mono}")


def test_criterion_08_rank_deficiency_contract():
    """2L+1 > 720/S => RankDeficient, boundary cases solve."""
    n = 720
    sig = power_law_signal(2.0, "signed", 60, n, seed=4)
    checks = {
        (45, 8): SolveStatus.RankDeficient,   # 91 > 90
        (44, 8): SolveStatus.Optimal,         # 89 <= 90
        (90, 4): SolveStatus.RankDeficient,   # 181 > 180
        (180, 2): SolveStatus.RankDeficient,  # 361 > 360
        (360, 1): SolveStatus.RankDeficient,  # 721 > 720
        (359, 1): SolveStatus.Optimal,
    }
    results = {}
    for (L, S), expected in checks.items():
        got = envelope_l1(sig, L, ConstraintGrid(n, S)).status
        results[(L, S)] = (got, expected)
        assert got is expected, ((L, S), got, expected)
    assert report("8 (rank-deficiency contract)", True,
                  f"{len(checks)} boundary cells match")


DATASET = os.environ.get("FEDENVELOPE_DATASET", "")


@pytest.mark.skipif(not DATASET, reason="set FEDENVELOPE_DATASET to the hourly "
                    "consumption CSV to run the dataset-conditional checks")
def test_criterion_09_dataset_conditional():
    """Reproduces the published dataset numbers (37 users, quantiles,
    S=2 Wasserstein, violation counts)."""
    from fedenvelope.fedsim import ClientRecord, ExperimentConfig, run_clients, \
        server_analytics
    from fedenvelope.ingest import filter_synchronized, load_csv

    t0 = time.time()
    column_map = {
        "timestamp": os.environ.get("FEDENVELOPE_TIME_COL", "time"),
        "user": os.environ.get("FEDENVELOPE_USER_COL", "user"),
        "value": os.environ.get("FEDENVELOPE_VALUE_COL", "W3"),
    }
    loaded = load_csv(DATASET, column_map)
    signals, _ = filter_synchronized(loaded.readings, min_days=30)
    assert len(signals) == 37, f"expected 37 synchronized users, got {len(signals)}"
    clients = [ClientRecord(uid, sig) for uid, sig in sorted(signals.items())]
    n = clients[0].signal.n
    assert n == 720

    # (a) pooled actual quantiles vs the published 0 / 6.09 / 204.53
    pooled = np.concatenate([c.signal.values for c in clients])
    cdf = empirical_cdf(pooled)
    q10, q50, q90 = (quantile(cdf, q) for q in (0.10, 0.50, 0.90))
    assert abs(q10 - 0.0) <= 0.01 * (1 + 0.0)
    assert abs(q50 - 6.09) <= 0.01 * 6.09
    assert abs(q90 - 204.53) <= 0.01 * 204.53

    # (b) envelope quantiles dominate and tighten as L grows
    prev = {q: math.inf for q in (0.10, 0.50, 0.90)}
    for L in (36, 180, 324):
        sols = run_clients(clients, L, 1, EnvelopeScheme.L1Opt)
        env_pooled = np.concatenate([sample(s.coeffs, n).values for s in sols])
        env_cdf = empirical_cdf(env_pooled)
        for q in (0.10, 0.50, 0.90):
            val = quantile(env_cdf, q)
            assert val >= quantile(cdf, q) - 1e-6
            assert val <= prev[q] + 1e-9
            prev[q] = val

    # (c) S=2, L=10 sum-signal Wasserstein within 5 percent of the table
    config = ExperimentConfig(L_values=(10,), subsample_S=(2,), n=n,
                              scheme_set=(EnvelopeScheme.L1Opt,),
                              analytics_target="sum")
    for scheme, expected in ((EnvelopeScheme.L1Opt, 9725.63),
                             (EnvelopeScheme.L2Opt, 11378.52)):
        sols = run_clients(clients, 10, 2, scheme)
        row = server_analytics(sols, clients, config, 10, 2)
        assert abs(row.wasserstein - expected) <= 0.05 * expected, \
            (scheme, row.wasserstein, expected)

    # (d) violation counts within +-2 of the published table
    table = {
        EnvelopeScheme.L1Opt: {10: 0, 20: 1, 30: 0, 40: 4, 50: 4, 60: 6, 70: 8, 80: 10},
        EnvelopeScheme.L2Opt: {10: 0, 20: 0, 30: 0, 40: 2, 50: 2, 60: 5, 70: 6, 80: 7},
    }
    for scheme, cells in table.items():
        for L, expected in cells.items():
            sols = run_clients(clients, L, 2, scheme)
            row = server_analytics(sols, clients, config, L, 2)
            assert abs(row.viol_count - expected) <= 2, (scheme, L, row.viol_count)

    elapsed = time.time() - t0
    assert report("9 (dataset-conditional)", elapsed < 1800,
                  f"all table checks passed in {elapsed:.0f}s")


def test_criterion_10_cli_determinism(tmp_path):
    """Identical CLI inputs produce byte-identical CSV outputs."""
    from fedenvelope.cli import main

    synth_dir = tmp_path / "data"
    assert main(["synth", "--output-dir", str(synth_dir), "--clients", "4",
                 "--days", "5", "--seed", "11"]) == 0
    ds = synth_dir / "synth_clients.csv"
    args = ["tradeoff", "--dataset", str(ds), "--cost", "both",
            "--l-values", "1,6,20", "--min-days", "5"]
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        assert main(args + ["--output-dir", str(out)]) == 0
        outs.append(out)
    identical = all(
        (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
        for f in ("tradeoff_l1.csv", "tradeoff_l2.csv"))
    assert report("10 (CLI determinism)", identical, "byte-identical reruns")
