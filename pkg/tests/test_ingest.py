import numpy as np
import pytest

from fedenvelope.ingest import filter_synchronized, load_csv

COLUMN_MAP = {"timestamp": "time", "user": "user", "value": "W3"}


def write_csv(tmp_path, rows, header="time,user,W3"):
    path = tmp_path / "data.csv"
    path.write_text(header + "\n" + "\n".join(rows) + "\n")
    return path


def hourly_rows(user, start_day, hours, value=1.0, skip=()):
    rows = []
    for h in range(hours):
        if h in skip:
            continue
        day = start_day + h // 24
        rows.append(f"2016-01-{day:02d} {h % 24:02d}:00:00,{user},{value + h}")
    return rows


class TestLoadCsv:
    def test_well_formed(self, tmp_path):
        path = write_csv(tmp_path, [
            "2016-01-01 00:00:00,u1,1.5",
            "2016-01-01 01:00:00,u1,2.0",
            "2016-01-01 00:00:00,u2,3.0",
        ])
        result = load_csv(path, COLUMN_MAP)
        assert len(result.readings) == 3
        assert result.skipped == 0
        assert result.readings[0].w3_energy == 1.5

    def test_malformed_rows_skipped(self, tmp_path):
        path = write_csv(tmp_path, [
            "2016-01-01 00:00:00,u1,1.5",
            "not-a-time,u1,2.0",
            "2016-01-01 02:00:00,u1,not-a-number",
            "2016-01-01 03:00:00,u1,-4.0",
            "2016-01-01 04:00:00,u1,2.5",
        ])
        result = load_csv(path, COLUMN_MAP)
        assert len(result.readings) == 2
        assert result.skipped == 3

    def test_alternate_timestamp_formats(self, tmp_path):
        path = write_csv(tmp_path, [
            "2016-01-01T05:00:00,u1,1.0",
            "2016/01/01 06:00,u1,2.0",
        ])
        assert len(load_csv(path, COLUMN_MAP).readings) == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "nope.csv", COLUMN_MAP)

    def test_missing_column(self, tmp_path):
        path = write_csv(tmp_path, ["2016-01-01 00:00:00,u1,1.0"],
                         header="when,user,W3")
        with pytest.raises(ValueError):
            load_csv(path, COLUMN_MAP)
        with pytest.raises(ValueError):
            load_csv(path, {"timestamp": "when", "user": "user"})

    def test_zero_parseable_rows(self, tmp_path):
        path = write_csv(tmp_path, ["bad,u1,xx"])
        with pytest.raises(ValueError):
            load_csv(path, COLUMN_MAP)


class TestFilterSynchronized:
    def test_two_full_users_retained(self, tmp_path):
        rows = hourly_rows("u1", 1, 48) + hourly_rows("u2", 1, 48)
        result = load_csv(write_csv(tmp_path, rows), COLUMN_MAP)
        signals, start = filter_synchronized(result.readings, min_days=2)
        assert sorted(signals) == ["u1", "u2"]
        assert all(s.n == 48 for s in signals.values())
        assert start == "2016-01-01 00:00:00"

    def test_user_with_gap_dropped(self, tmp_path):
        rows = hourly_rows("u1", 1, 48) + hourly_rows("u2", 1, 48, skip={20})
        result = load_csv(write_csv(tmp_path, rows), COLUMN_MAP)
        signals, _ = filter_synchronized(result.readings, min_days=2)
        assert sorted(signals) == ["u1"]

    def test_window_maximizes_user_count(self, tmp_path):
        # u1 covers days 1-2, u2 and u3 cover days 2-3: the day-2 window
        # start retains two users
        rows = (hourly_rows("u1", 1, 48)
                + hourly_rows("u2", 2, 48) + hourly_rows("u3", 2, 48))
        result = load_csv(write_csv(tmp_path, rows), COLUMN_MAP)
        signals, start = filter_synchronized(result.readings, min_days=2)
        assert sorted(signals) == ["u2", "u3"]
        assert start.startswith("2016-01-02")

    def test_values_in_window_order(self, tmp_path):
        rows = hourly_rows("u1", 1, 24, value=100.0)
        result = load_csv(write_csv(tmp_path, rows), COLUMN_MAP)
        signals, _ = filter_synchronized(result.readings, min_days=1)
        np.testing.assert_allclose(signals["u1"].values, 100.0 + np.arange(24))

    def test_no_window(self, tmp_path):
        rows = hourly_rows("u1", 1, 10)
        result = load_csv(write_csv(tmp_path, rows), COLUMN_MAP)
        with pytest.raises(ValueError):
            filter_synchronized(result.readings, min_days=1)

    def test_deterministic(self, tmp_path):
        rows = hourly_rows("u1", 1, 72) + hourly_rows("u2", 1, 72)
        path = write_csv(tmp_path, rows)
        a = filter_synchronized(load_csv(path, COLUMN_MAP).readings, 3)
        b = filter_synchronized(load_csv(path, COLUMN_MAP).readings, 3)
        assert a[1] == b[1]
        for user in a[0]:
            np.testing.assert_array_equal(a[0][user].values, b[0][user].values)
