import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from airban.errors import InputError
from airban.regions import EU27
from airban.tracking import (
    GLOBAL_KEY,
    LOCKDOWN_WEEK,
    REFERENCE_WEEK,
    DailySeries,
    DateWindow,
    DepartureEvent,
    daily_counts,
    normalize_to_max,
    pair_ratio_matrix,
    parse_departures,
    window_ratio,
    write_departures,
    zero_spans,
)

from departure_fixture import LOCKDOWN, REFERENCE, build_log


def test_country_ratios():
    ratios = window_ratio(build_log(), "country", LOCKDOWN_WEEK, REFERENCE_WEEK)
    for country in REFERENCE:
        assert ratios[country].count_b == REFERENCE[country]
        assert ratios[country].ratio == LOCKDOWN[country] / REFERENCE[country]


def test_global_and_eu_ratio():
    log = build_log()
    assert window_ratio(log, "global", LOCKDOWN_WEEK, REFERENCE_WEEK)[GLOBAL_KEY].ratio == 0.48
    assert window_ratio(log, "global", LOCKDOWN_WEEK, REFERENCE_WEEK, countries=EU27)[GLOBAL_KEY].ratio == 0.35


def test_zero_reference_gives_none():
    e = DepartureEvent(dt.datetime(2020, 3, 20, 10), "AAA", "IT")
    r = window_ratio([e], "airport", LOCKDOWN_WEEK, REFERENCE_WEEK)["AAA"]
    assert r.count_a == 1 and r.count_b == 0 and r.ratio is None


def test_pair_matrix_counts_add_up():
    log = build_log()
    matrix = pair_ratio_matrix(log, LOCKDOWN_WEEK, REFERENCE_WEEK)
    assert sum(r.count_b for r in matrix.values()) == sum(REFERENCE.values())
    assert sum(r.count_a for r in matrix.values()) == sum(LOCKDOWN.values())
    assert all(len(k) == 2 for k in matrix)


def test_daily_counts_zero_filled():
    window = DateWindow(dt.date(2020, 1, 28), dt.date(2020, 2, 8))
    series = daily_counts(build_log(), "country", window, groups=["FR"])
    assert set(series) == {"DE", "IT", "US", "FR"}
    assert len(series["IT"].values) == 12
    assert series["IT"].values[:2] == (0, 0)
    assert sum(series["IT"].values) == REFERENCE["IT"]
    assert set(series["FR"].values) == {0}


def test_airline_series_one_per_code():
    series = daily_counts(build_log(), "airline", DateWindow(dt.date(2020, 1, 1), dt.date(2020, 3, 31)))
    assert sorted(series) == ["AZ", "LH", "UA"]


def test_normalized_series_bounds():
    series = daily_counts(build_log(), "airport", DateWindow(dt.date(2020, 1, 1), dt.date(2020, 3, 25)))
    for s in series.values():
        norm = normalize_to_max(s).values
        assert min(norm) >= 0.0 and max(norm) == 1.0


def test_all_zero_series_stays_zero():
    s = DailySeries("X", (dt.date(2020, 1, 1), dt.date(2020, 1, 2)), (0, 0))
    assert normalize_to_max(s).values == (0.0, 0.0)


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.integers(0, 1000), min_size=1, max_size=60))
def test_normalization_property(values):
    dates = tuple(dt.date(2020, 1, 1) + dt.timedelta(days=i) for i in range(len(values)))
    norm = normalize_to_max(DailySeries("k", dates, tuple(values))).values
    assert all(0.0 <= v <= 1.0 for v in norm)
    if max(values) > 0:
        assert max(norm) == 1.0
        assert norm.index(1.0) == values.index(max(values))


def test_zero_spans():
    dates = tuple(dt.date(2020, 1, 1) + dt.timedelta(days=i) for i in range(8))
    s = DailySeries("k", dates, (1, 0, 0, 0, 2, 0, 0, 0))
    assert zero_spans(s, 3) == [(dates[1], dates[3]), (dates[5], dates[7])]


def test_departure_file_roundtrip(tmp_path):
    log = build_log()
    write_departures(log, tmp_path / "d.csv")
    assert parse_departures(tmp_path / "d.csv") == log


@pytest.mark.parametrize(
    "row, fragment",
    [
        ("notatime,FCO,IT,,,\n", "timestamp"),
        ("2020-03-01T10:00:00Z,,IT,,,\n", "missing origin"),
        ("2020-03-01T10:00:00Z,FCO,ITA,,,\n", "bad origin"),
    ],
)
def test_bad_departure_rows(tmp_path, row, fragment):
    path = tmp_path / "d.csv"
    path.write_text("departure_time,origin_airport,origin_country,dest_airport,dest_country,airline_code\n"
                    "2020-03-01T09:00:00Z,FCO,IT,,,AZ\n" + row)
    with pytest.raises(InputError, match=f":3: .*{fragment}"):
        parse_departures(path)


def test_timezones_converted_to_utc(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("departure_time,origin_airport,origin_country,dest_airport,dest_country,airline_code\n"
                    "2020-03-19T00:30:00+02:00,FCO,IT,,,\n")
    (event,) = parse_departures(path)
    assert event.day == dt.date(2020, 3, 18)


def test_window_parsing():
    assert DateWindow.parse("2020-01-30..2020-02-05") == REFERENCE_WEEK
    assert DateWindow.parse("2020-03-19:2020-03-25") == LOCKDOWN_WEEK
    with pytest.raises(ValueError):
        DateWindow.parse("2020-03-25..2020-03-19")
