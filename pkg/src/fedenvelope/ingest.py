"""Hourly consumption CSV loading and synchronized-user windowing.

The loader is schema-agnostic: a column map names the timestamp, user and
energy columns.  Timestamps are parsed naively in the declared timezone
(no DST arithmetic) at hour resolution.  Synchronization is strict: a user
enters the common window only with a reading for every hour in it; no
imputation is performed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from .signal import SampledSignal

__all__ = ["RawReading", "LoadResult", "load_csv", "filter_synchronized"]

_EPOCH = datetime(1970, 1, 1)
_TIME_FORMATS = (
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%d %H:%M",
    "%Y/%m/%d %H:%M:%S",
    "%Y/%m/%d %H:%M",
    "%d-%m-%Y %H:%M",
    "%d/%m/%Y %H:%M",
)


@dataclass(frozen=True)
class RawReading:
    timestamp: datetime
    user_id: str
    w3_energy: float


@dataclass(frozen=True)
class LoadResult:
    readings: list[RawReading]
    skipped: int


def _parse_time(text: str) -> datetime | None:
    text = text.strip()
    try:
        return datetime.fromisoformat(text)
    except ValueError:
        pass
    for fmt in _TIME_FORMATS:
        try:
            return datetime.strptime(text, fmt)
        except ValueError:
            continue
    return None


def load_csv(path, column_map: dict) -> LoadResult:
    """Read hourly readings; malformed rows are counted, not fatal.

    ``column_map`` must provide the CSV header names under the keys
    ``timestamp``, ``user`` and ``value``.  Rows with unparseable
    timestamps, non-numeric or negative energy are skipped.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    for key in ("timestamp", "user", "value"):
        if key not in column_map:
            raise ValueError(f"column_map is missing the {key!r} entry")

    readings: list[RawReading] = []
    skipped = 0
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path} has no header row")
        for key in ("timestamp", "user", "value"):
            if column_map[key] not in reader.fieldnames:
                raise ValueError(
                    f"column {column_map[key]!r} not found in {reader.fieldnames}")
        for row in reader:
            ts = _parse_time(row[column_map["timestamp"]] or "")
            user = (row[column_map["user"]] or "").strip()
            try:
                value = float(row[column_map["value"]])
            except (TypeError, ValueError):
                value = None
            if ts is None or not user or value is None or not np.isfinite(value) \
                    or value < 0:
                skipped += 1
                continue
            readings.append(RawReading(ts, user, value))
    if not readings:
        raise ValueError(f"no parseable rows in {path}")
    return LoadResult(readings, skipped)


def _hour_index(ts: datetime) -> int:
    return int((ts - _EPOCH).total_seconds() // 3600)


def filter_synchronized(readings, min_days: int):
    """Users with a complete common window of min_days*24 hourly readings.

    The window is chosen to maximize the retained-user count, earliest
    start on ties; any missing hour inside the window disqualifies a user.
    Returns ``{user_id: SampledSignal}`` with n = min_days*24 per user,
    plus the winning start hour, as ``(signals, start_hour_iso)``.
    """
    if min_days < 1:
        raise ValueError("min_days must be >= 1")
    width = min_days * 24

    per_user: dict[str, dict[int, float]] = {}
    for r in readings:
        per_user.setdefault(r.user_id, {}).setdefault(_hour_index(r.timestamp),
                                                      r.w3_energy)

    # Valid starts per user form unions of intervals [run_start, run_end-W+1];
    # sweep +-1 events to find the earliest start with the most users.
    events: dict[int, int] = {}
    for hours in per_user.values():
        idx = sorted(hours)
        run_start = prev = idx[0]
        runs = []
        for h in idx[1:]:
            if h != prev + 1:
                runs.append((run_start, prev))
                run_start = h
            prev = h
        runs.append((run_start, prev))
        for r0, r1 in runs:
            last_start = r1 - width + 1
            if last_start >= r0:
                events[r0] = events.get(r0, 0) + 1
                events[last_start + 1] = events.get(last_start + 1, 0) - 1

    if not events:
        raise ValueError(f"no user has {min_days} consecutive days of data")
    best_count, best_start, running = 0, None, 0
    for h in sorted(events):
        running += events[h]
        if running > best_count:
            best_count, best_start = running, h
    if best_start is None:
        raise ValueError(f"no user has {min_days} consecutive days of data")

    signals = {}
    window = range(best_start, best_start + width)
    for user in sorted(per_user):
        hours = per_user[user]
        if all(h in hours for h in window):
            signals[user] = SampledSignal(np.array([hours[h] for h in window]))
    start_iso = (_EPOCH + timedelta(hours=best_start)).isoformat(sep=" ")
    return signals, start_iso
