"""Command-line driver: dataset ingestion, experiments, bound verification.

Every run writes its result files plus a ``manifest.json`` (resolved
configuration, seed, dataset fingerprint, tool version) sufficient to
reproduce it.  Configuration comes from long flags only, optionally
seeded from a JSON file via ``--config`` (explicit flags win); environment
variables are deliberately not consulted so the manifest stays complete.

Exit codes: 0 success; 1 row-level failures or bound violations (results
still written); 2 fatal errors (unreadable dataset, unwritable output).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import empirical_cdf, quantile
from .bounds import verify_theorem1, verify_theorem2
from .envelope import EnvelopeScheme
from .fedsim import (
    ClientRecord,
    ExperimentConfig,
    MetricsRow,
    experiment_subsampling,
    experiment_tradeoff,
    max_full_rank_bandwidth,
    rows_to_csv,
)
from .ingest import filter_synchronized, load_csv
from .signal import SmoothnessParams, sample, synth_power_law

_DATASET_COMMANDS = ("tradeoff", "cdf", "quantiles", "subsample")

_DEFAULTS = {
    "output_dir": ".",
    "seed": 0,
    "cost": "l1",
    "l_values": "1,36,72,180,359",
    "s_values": "1,2,4,8",
    "analytics_target": "pooled",
    "time_col": "time",
    "user_col": "user",
    "value_col": "W3",
    "timezone": "UTC",
    "min_days": 30,
    "trials": 5,
    "p_values": "1.5,2,3",
    "bound_l_values": "5,10,20",
    "clients": 8,
    "days": 30,
}

_SCHEMES = {
    "l1": EnvelopeScheme.L1Opt,
    "l2": EnvelopeScheme.L2Opt,
}


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in str(text).split(",") if tok.strip()]


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in str(text).split(",") if tok.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fedenvelope", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, dataset: bool):
        p.add_argument("--config", default=None, help="JSON file with flag defaults")
        p.add_argument("--output-dir", dest="output_dir", default=None)
        p.add_argument("--seed", type=int, default=None)
        if dataset:
            p.add_argument("--dataset", default=None)
            p.add_argument("--time-col", dest="time_col", default=None)
            p.add_argument("--user-col", dest="user_col", default=None)
            p.add_argument("--value-col", dest="value_col", default=None)
            p.add_argument("--timezone", default=None)
            p.add_argument("--min-days", dest="min_days", type=int, default=None)
            p.add_argument("--cost", choices=("l1", "l2", "both"), default=None)
            p.add_argument("--l-values", dest="l_values", default=None)
            p.add_argument("--analytics-target", dest="analytics_target",
                           choices=("pooled", "sum"), default=None)

    for name in ("tradeoff", "cdf", "quantiles"):
        add_common(sub.add_parser(name), dataset=True)
    p_sub = sub.add_parser("subsample")
    add_common(p_sub, dataset=True)
    p_sub.add_argument("--s-values", dest="s_values", default=None)

    p_ver = sub.add_parser("verify-bounds")
    add_common(p_ver, dataset=False)
    p_ver.add_argument("--trials", type=int, default=None)
    p_ver.add_argument("--p-values", dest="p_values", default=None)
    p_ver.add_argument("--l-values", dest="bound_l_values", default=None)

    p_synth = sub.add_parser("synth")
    add_common(p_synth, dataset=False)
    p_synth.add_argument("--clients", type=int, default=None)
    p_synth.add_argument("--days", type=int, default=None)
    return parser


def _resolve_config(args: argparse.Namespace) -> dict:
    resolved = dict(_DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise ValueError("--config must contain a JSON object")
        unknown = set(file_cfg) - set(_DEFAULTS) - {"dataset"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        resolved.update(file_cfg)
    resolved["dataset"] = getattr(args, "dataset", None) or resolved.get("dataset")
    for key, value in vars(args).items():
        if key in ("config", "subcommand", "dataset") or value is None:
            continue
        resolved[key] = value
    resolved["subcommand"] = args.subcommand
    return resolved


def _dataset_clients(cfg: dict):
    path = Path(cfg["dataset"])
    column_map = {"timestamp": cfg["time_col"], "user": cfg["user_col"],
                  "value": cfg["value_col"]}
    loaded = load_csv(path, column_map)
    signals, window_start = filter_synchronized(loaded.readings, int(cfg["min_days"]))
    if not signals:
        raise ValueError("no synchronized users found")
    clients = [ClientRecord(uid, sig) for uid, sig in sorted(signals.items())]
    meta = {
        "users_loaded": len({r.user_id for r in loaded.readings}),
        "users_retained": len(clients),
        "rows_skipped": loaded.skipped,
        "window_start": window_start,
        "n": clients[0].signal.n,
    }
    return clients, meta


def _fingerprint(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write(out_dir: Path, name: str, text: str) -> str:
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / name
    target.write_text(text)
    return str(target)


def _manifest(out_dir: Path, cfg: dict, outputs: list[str], extra: dict | None = None):
    payload = {
        "tool": "fedenvelope",
        "version": __version__,
        "config": {k: cfg[k] for k in sorted(cfg) if cfg[k] is not None},
        "dataset_sha256": _fingerprint(cfg["dataset"]) if cfg.get("dataset") else None,
        "outputs": sorted(Path(p).name for p in outputs),
    }
    if extra:
        payload["dataset_summary"] = extra
    _write(out_dir, "manifest.json", json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _costs(cfg: dict) -> list[str]:
    return ["l1", "l2"] if cfg["cost"] == "both" else [cfg["cost"]]


def _rows_failed(rows: list[MetricsRow]) -> bool:
    return any(r.status != "Optimal" for r in rows)


def _run_tradeoff(cfg: dict, out_dir: Path) -> int:
    clients, meta = _dataset_clients(cfg)
    n = clients[0].signal.n
    failed = False
    outputs = []
    for cost in _costs(cfg):
        config = ExperimentConfig(
            cost=cost,
            L_values=tuple(_int_list(cfg["l_values"])),
            subsample_S=(1,),
            n=n,
            scheme_set=(_SCHEMES[cost], EnvelopeScheme.Naive, EnvelopeScheme.MseBaseline),
            seed=int(cfg["seed"]),
            analytics_target=cfg["analytics_target"],
        )
        rows = experiment_tradeoff(clients, config)
        outputs.append(_write(out_dir, f"tradeoff_{cost}.csv", rows_to_csv(rows)))
        failed |= _rows_failed(rows)
    _manifest(out_dir, cfg, outputs, meta)
    return 1 if failed else 0


def _run_subsample(cfg: dict, out_dir: Path) -> int:
    clients, meta = _dataset_clients(cfg)
    n = clients[0].signal.n
    failed = False
    outputs = []
    for cost in _costs(cfg):
        config = ExperimentConfig(
            cost=cost,
            L_values=tuple(_int_list(cfg["l_values"])),
            subsample_S=tuple(_int_list(cfg["s_values"])),
            n=n,
            scheme_set=(_SCHEMES[cost],),
            seed=int(cfg["seed"]),
            analytics_target=cfg["analytics_target"],
        )
        rows = experiment_subsampling(clients, config)
        outputs.append(_write(out_dir, f"subsample_{cost}.csv", rows_to_csv(rows)))
        failed |= _rows_failed(rows)
    _manifest(out_dir, cfg, outputs, meta)
    return 1 if failed else 0


def _pooled_values(clients, target):
    mat = np.stack([c.signal.values for c in clients])
    return mat.ravel() if target == "pooled" else mat.sum(axis=0)


def _cdf_curve(values, max_points: int = 1024):
    s = np.sort(np.asarray(values))
    n = len(s)
    idx = np.unique(np.linspace(0, n - 1, min(max_points, n)).astype(int))
    return s[idx], (idx + 1) / n


def _reconstructed_values(clients, L, scheme, cost, n, target):
    from .fedsim import run_clients

    sols = run_clients(clients, L, 1, scheme)
    if any(not s.ok for s in sols):
        return None
    mat = np.stack([sample(s.coeffs, n).values for s in sols])
    return mat.ravel() if target == "pooled" else mat.sum(axis=0)


def _run_cdf(cfg: dict, out_dir: Path) -> int:
    clients, meta = _dataset_clients(cfg)
    n = clients[0].signal.n
    target = cfg["analytics_target"]
    failed = False
    outputs = []
    for cost in _costs(cfg):
        lines = ["series,cost,L,x,F"]
        xs, fs = _cdf_curve(_pooled_values(clients, target))
        lines += [f"actual,,,{x:.12g},{F:.12g}" for x, F in zip(xs, fs)]
        for L in _int_list(cfg["l_values"]):
            L = min(L, max_full_rank_bandwidth(n))
            for series, scheme in (("envelope", _SCHEMES[cost]),
                                   ("naive", EnvelopeScheme.Naive)):
                values = _reconstructed_values(clients, L, scheme, cost, n, target)
                if values is None:
                    failed = True
                    continue
                xs, fs = _cdf_curve(values)
                lines += [f"{series},{cost},{L},{x:.12g},{F:.12g}"
                          for x, F in zip(xs, fs)]
        outputs.append(_write(out_dir, f"cdf_{cost}.csv", "\n".join(lines) + "\n"))
    _manifest(out_dir, cfg, outputs, meta)
    return 1 if failed else 0


def _run_quantiles(cfg: dict, out_dir: Path) -> int:
    clients, meta = _dataset_clients(cfg)
    n = clients[0].signal.n
    target = cfg["analytics_target"]
    qs = (10, 50, 90)
    failed = False
    outputs = []
    for cost in _costs(cfg):
        lines = ["quantile_pct,series,cost,L,value"]
        actual = empirical_cdf(_pooled_values(clients, target))
        for q in qs:
            lines.append(f"{q},actual,,,{quantile(actual, q / 100):.12g}")
        for L in _int_list(cfg["l_values"]):
            L = min(L, max_full_rank_bandwidth(n))
            for series, scheme in (("envelope", _SCHEMES[cost]),
                                   ("naive", EnvelopeScheme.Naive)):
                values = _reconstructed_values(clients, L, scheme, cost, n, target)
                if values is None:
                    failed = True
                    continue
                cdf = empirical_cdf(values)
                for q in qs:
                    lines.append(
                        f"{q},{series},{cost},{L},{quantile(cdf, q / 100):.12g}")
        outputs.append(_write(out_dir, f"quantiles_{cost}.csv", "\n".join(lines) + "\n"))
    _manifest(out_dir, cfg, outputs, meta)
    return 1 if failed else 0


def _run_verify_bounds(cfg: dict, out_dir: Path) -> int:
    reports = []
    for p in _float_list(cfg["p_values"]):
        reports.append(verify_theorem1(int(cfg["trials"]), p,
                                       _int_list(cfg["bound_l_values"]),
                                       int(cfg["seed"])))
        reports.append(verify_theorem2(int(cfg["trials"]), p,
                                       _int_list(cfg["bound_l_values"]),
                                       None, int(cfg["seed"])))
    body = "[" + ",\n".join(r.to_json() for r in reports) + "]\n"
    outputs = [_write(out_dir, "verify_bounds.json", body)]
    _manifest(out_dir, cfg, outputs)
    return 0 if all(r.all_ok for r in reports) else 1


def _run_synth(cfg: dict, out_dir: Path) -> int:
    """Synthetic multi-client hourly CSV in the ingest schema."""
    clients = int(cfg["clients"])
    days = int(cfg["days"])
    seed = int(cfg["seed"])
    n = days * 24
    lines = [f"{cfg['time_col']},{cfg['user_col']},{cfg['value_col']}"]
    base = np.datetime64("2016-01-01T00:00:00")
    stamps = [str((base + np.timedelta64(j, "h"))).replace("T", " ") for j in range(n)]
    for i in range(clients):
        series = synth_power_law(SmoothnessParams(1.0, 2.0), "signed", 60, seed + i)
        values = sample(series, n).values
        values = 400.0 * (values - values.min())  # nonnegative watt-hour scale
        uid = f"user{i:02d}"
        lines += [f"{stamps[j]},{uid},{values[j]:.6f}" for j in range(n)]
    outputs = [_write(out_dir, "synth_clients.csv", "\n".join(lines) + "\n")]
    _manifest(out_dir, cfg, outputs)
    return 0


_RUNNERS = {
    "tradeoff": _run_tradeoff,
    "cdf": _run_cdf,
    "quantiles": _run_quantiles,
    "subsample": _run_subsample,
    "verify-bounds": _run_verify_bounds,
    "synth": _run_synth,
}


def run(cfg: dict) -> int:
    """Execute one resolved configuration; returns the process exit code."""
    subcommand = cfg["subcommand"]
    if subcommand in _DATASET_COMMANDS and not cfg.get("dataset"):
        print("error: --dataset is required for this subcommand", file=sys.stderr)
        return 2
    out_dir = Path(cfg["output_dir"])
    try:
        return _RUNNERS[subcommand](cfg, out_dir)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
