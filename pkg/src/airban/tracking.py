"""Departure-log analytics: daily counts, normalized trends, window ratios."""

from __future__ import annotations

import csv
import datetime as dt
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ._io import atomic_write
from ._validation import AIRPORT_RE, COUNTRY_RE
from .errors import InputError

DEPARTURE_HEADER = ["departure_time", "origin_airport", "origin_country", "dest_airport", "dest_country",
                    "airline_code"]
GROUPINGS = ("airport", "country", "airline", "global")
GLOBAL_KEY = "ALL"


@dataclass(frozen=True)
class DateWindow:
    """Inclusive range of calendar days."""

    start: dt.date
    end: dt.date

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError(f"inverted window: {self.start} > {self.end}")

    def __contains__(self, day):
        return self.start <= day <= self.end

    def days(self) -> list[dt.date]:
        n = (self.end - self.start).days + 1
        return [self.start + dt.timedelta(days=i) for i in range(n)]

    @classmethod
    def parse(cls, text: str) -> "DateWindow":
        """``YYYY-MM-DD:YYYY-MM-DD`` or ``YYYY-MM-DD..YYYY-MM-DD``."""
        sep = ".." if ".." in text else ":"
        a, _, b = text.partition(sep)
        return cls(dt.date.fromisoformat(a.strip()), dt.date.fromisoformat(b.strip()))


# weeks compared in the published country and country-pair maps
REFERENCE_WEEK = DateWindow(dt.date(2020, 1, 30), dt.date(2020, 2, 5))
LOCKDOWN_WEEK = DateWindow(dt.date(2020, 3, 19), dt.date(2020, 3, 25))
AIRPORT_TREND_WINDOW = DateWindow(dt.date(2020, 1, 1), dt.date(2020, 3, 25))
AIRLINE_TREND_WINDOW = DateWindow(dt.date(2020, 2, 15), dt.date(2020, 3, 25))
PRESETS = {
    "reference_week": REFERENCE_WEEK,
    "lockdown_week": LOCKDOWN_WEEK,
    "airport_trend": AIRPORT_TREND_WINDOW,
    "airline_trend": AIRLINE_TREND_WINDOW,
}


@dataclass(frozen=True)
class DepartureEvent:
    departure_time: dt.datetime
    origin_airport: str
    origin_country: str
    destination_airport: str | None = None
    destination_country: str | None = None
    airline_code: str | None = None

    @property
    def day(self) -> dt.date:
        return self.departure_time.date()

    def group(self, group_by: str) -> str | None:
        if group_by == "airport":
            return self.origin_airport
        if group_by == "country":
            return self.origin_country
        if group_by == "airline":
            return self.airline_code
        if group_by == "global":
            return GLOBAL_KEY
        raise ValueError(f"group_by must be one of {GROUPINGS}, got {group_by!r}")


def _parse_time(text: str) -> dt.datetime:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    stamp = dt.datetime.fromisoformat(text)
    if stamp.tzinfo is not None:
        stamp = stamp.astimezone(dt.timezone.utc).replace(tzinfo=None)
    return stamp


def parse_departures(path) -> list[DepartureEvent]:
    """Read a departures CSV; timestamps are UTC (ISO 8601)."""
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: unreadable: {exc}") from None
    events = []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != DEPARTURE_HEADER:
            raise InputError(f"{path}:1: header must be {','.join(DEPARTURE_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            row = row + [""] * (len(DEPARTURE_HEADER) - len(row))
            if len(row) > len(DEPARTURE_HEADER):
                raise InputError(f"{path}:{lineno}: too many fields")
            stamp, o_ap, o_c, d_ap, d_c, airline = (x.strip() for x in row)
            try:
                when = _parse_time(stamp)
            except ValueError:
                raise InputError(f"{path}:{lineno}: unparseable timestamp {stamp!r}") from None
            if not o_ap or not o_c:
                raise InputError(f"{path}:{lineno}: missing origin airport or country")
            if not AIRPORT_RE.fullmatch(o_ap) or not COUNTRY_RE.fullmatch(o_c):
                raise InputError(f"{path}:{lineno}: bad origin code {o_ap!r}/{o_c!r}")
            events.append(DepartureEvent(when, o_ap, o_c, d_ap or None, d_c or None, airline or None))
    events.sort(key=lambda e: (e.departure_time, e.origin_airport))
    return events


def write_departures(events: Iterable[DepartureEvent], path) -> None:
    with atomic_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DEPARTURE_HEADER)
        for e in events:
            writer.writerow([e.departure_time.isoformat(), e.origin_airport, e.origin_country,
                             e.destination_airport or "", e.destination_country or "", e.airline_code or ""])


# ---------------------------------------------------------------- daily series


@dataclass(frozen=True)
class DailySeries:
    key: str
    dates: tuple[dt.date, ...]
    values: tuple[float, ...]

    @property
    def points(self):
        return list(zip(self.dates, self.values))


def daily_counts(events: Sequence[DepartureEvent], group_by: str, window: DateWindow,
                 groups: Iterable[str] | None = None) -> dict[str, DailySeries]:
    """Zero-filled daily departures per group inside ``window``.

    Every group seen in the window gets a series; ``groups`` adds groups
    that should appear even without departures.
    """
    if group_by not in GROUPINGS:
        raise ValueError(f"group_by must be one of {GROUPINGS}, got {group_by!r}")
    counts: Counter = Counter()
    keys = set(groups or ())
    for e in events:
        day = e.day
        if day not in window:
            continue
        key = e.group(group_by)
        if key is None:
            continue
        counts[key, day] += 1
        keys.add(key)
    days = tuple(window.days())
    return {k: DailySeries(k, days, tuple(counts.get((k, d), 0) for d in days)) for k in sorted(keys)}


def normalize_to_max(series: DailySeries) -> DailySeries:
    """Divide every point by the series maximum; all-zero stays all-zero."""
    if not series.values:
        raise ValueError("cannot normalize an empty series")
    peak = max(series.values)
    if peak <= 0:
        return DailySeries(series.key, series.dates, tuple(0.0 for _ in series.values))
    return DailySeries(series.key, series.dates, tuple(v / peak for v in series.values))


def zero_spans(series: DailySeries, min_days: int = 3) -> list[tuple[dt.date, dt.date]]:
    """Runs of at least ``min_days`` consecutive zero days (likely coverage gaps)."""
    spans, start = [], None
    for day, value in zip(series.dates + (None,), series.values + (1,)):
        if value == 0 and start is None:
            start = day
        elif value != 0 and start is not None:
            end = day - dt.timedelta(days=1) if day is not None else series.dates[-1]
            if (end - start).days + 1 >= min_days:
                spans.append((start, end))
            start = None
    return spans


# ---------------------------------------------------------------- window ratios


@dataclass(frozen=True)
class WindowRatio:
    key: object
    count_a: int
    count_b: int

    @property
    def ratio(self) -> float | None:
        return self.count_a / self.count_b if self.count_b else None


def _window_counts(events, key_of, window_a, window_b):
    a, b = Counter(), Counter()
    for e in events:
        key = key_of(e)
        if key is None:
            continue
        day = e.day
        if day in window_a:
            a[key] += 1
        if day in window_b:
            b[key] += 1
    return a, b


def window_ratio(events: Sequence[DepartureEvent], group_by: str, window_a: DateWindow, window_b: DateWindow,
                 countries: Iterable[str] | None = None) -> dict[str, WindowRatio]:
    """Departures in ``window_a`` over departures in ``window_b`` per group.

    ``countries`` restricts the events to those departing the listed
    countries, so ``group_by="global"`` with the EU27 list gives the
    EU-aggregate ratio.
    """
    if group_by not in GROUPINGS:
        raise ValueError(f"group_by must be one of {GROUPINGS}, got {group_by!r}")
    if countries is not None:
        allowed = set(countries)
        events = [e for e in events if e.origin_country in allowed]
    a, b = _window_counts(events, lambda e: e.group(group_by), window_a, window_b)
    return {k: WindowRatio(k, a[k], b[k]) for k in sorted(set(a) | set(b))}


def pair_ratio_matrix(events: Sequence[DepartureEvent], window_a: DateWindow,
                      window_b: DateWindow) -> dict[tuple[str, str], WindowRatio]:
    """Window ratio per (origin country, destination country)."""
    a, b = _window_counts(
        events,
        lambda e: (e.origin_country, e.destination_country) if e.destination_country else None,
        window_a,
        window_b,
    )
    return {k: WindowRatio(k, a[k], b[k]) for k in sorted(set(a) | set(b))}


# ---------------------------------------------------------------- export


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def write_ratios(ratios: dict, path, key_header="key") -> None:
    with atomic_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([key_header, "count_a", "count_b", "ratio"])
        for key, r in ratios.items():
            writer.writerow([key, r.count_a, r.count_b, _fmt(r.ratio)])


def write_pair_matrix(matrix: dict, path) -> None:
    with atomic_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["origin_country", "dest_country", "ratio", "count_a", "count_b"])
        for (o, d), r in matrix.items():
            writer.writerow([o, d, _fmt(r.ratio), r.count_a, r.count_b])


def write_series(series: dict[str, DailySeries], path, key_header="key") -> None:
    """Long-form ``key,date,count,normalized`` rows."""
    with atomic_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([key_header, "date", "count", "normalized"])
        for key, s in series.items():
            norm = normalize_to_max(s)
            for day, count, share in zip(s.dates, s.values, norm.values):
                writer.writerow([key, day.isoformat(), count, repr(float(share))])
