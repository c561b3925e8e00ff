"""Historical route corpus: parsing, validation, filtering, synthetic data.

The corpus is stored column-wise: one row per route (sorted by origin then
destination) and one column per month from January 2010 to October 2019.
Missing months are ``NaN``; they are absent observations, not zeros.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np
import pandas as pd

from ._config import get_float, read_keyvalue
from ._io import atomic_write
from ._validation import (
    check_airport_code,
    check_country_code,
    check_non_negative_int,
    check_positive_int,
    check_real,
)
from .errors import ConfigError, CorpusFormatError, InputError

FIRST_YEAR = 2010
LAST_YEAR = 2019
LAST_MONTH = 10
N_MONTHS = (LAST_YEAR - FIRST_YEAR) * 12 + LAST_MONTH  # 118

SERIES_HEADER = ["origin", "dest", "year", "month", "passengers", "avg_fare"]
AIRPORTS_HEADER = ["code", "country", "name"]


def month_index(year, month):
    """Column of ``(year, month)`` in the corpus grid."""
    return (np.asarray(year) - FIRST_YEAR) * 12 + (np.asarray(month) - 1)


def index_month(idx) -> tuple[int, int]:
    year, m = divmod(int(idx), 12)
    return FIRST_YEAR + year, m + 1


@dataclass(frozen=True, order=True)
class RouteKey:
    origin: str
    destination: str

    def __post_init__(self):
        check_airport_code(self.origin, "origin")
        check_airport_code(self.destination, "destination")
        if self.origin == self.destination:
            raise ValueError(f"origin and destination are both {self.origin}")

    def __str__(self):
        return f"{self.origin}-{self.destination}"


@dataclass(frozen=True)
class MonthlyObservation:
    year: int
    month: int
    passengers: int
    avg_fare: float | None = None

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be in 1..12, got {self.month}")
        if not (FIRST_YEAR, 1) <= (self.year, self.month) <= (LAST_YEAR, LAST_MONTH):
            raise ValueError(f"{self.year}-{self.month:02d} outside Jan 2010 - Oct 2019")
        check_non_negative_int(self.passengers, "passengers")
        if self.avg_fare is not None:
            check_real(self.avg_fare, "avg_fare", minimum=0.0)


@dataclass(frozen=True)
class RouteSeries:
    key: RouteKey
    observations: tuple[MonthlyObservation, ...]
    max_monthly_passengers: int = field(init=False)

    def __post_init__(self):
        stamps = [(o.year, o.month) for o in self.observations]
        if any(a >= b for a, b in zip(stamps, stamps[1:])):
            raise ValueError(f"{self.key}: observations must be sorted and unique")
        peak = max((o.passengers for o in self.observations), default=0)
        object.__setattr__(self, "max_monthly_passengers", peak)


@dataclass(frozen=True)
class AirportRef:
    code: str
    country: str
    name: str = ""

    def __post_init__(self):
        check_airport_code(self.code)
        check_country_code(self.country)


def _readonly(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


class RouteCorpus:
    """Immutable collection of monthly route series plus the airport table.

    Parameters
    ----------
    origins, destinations : array-like of str
        Route endpoints, one entry per route.
    passengers : array-like, shape (n_routes, 118)
        Monthly passenger counts, ``NaN`` where the month is not observed.
    fares : array-like, shape (n_routes, 118), optional
        Monthly average fares (US$ per passenger), ``NaN`` where absent.
    airports : mapping or iterable of AirportRef, optional
    """

    def __init__(self, origins, destinations, passengers, fares=None, airports=None):
        origins = np.asarray(origins, dtype="<U3").reshape(-1)
        destinations = np.asarray(destinations, dtype="<U3").reshape(-1)
        n = origins.shape[0]
        passengers = np.asarray(passengers, dtype=float).reshape(n, N_MONTHS)
        if fares is None:
            fares = np.full((n, N_MONTHS), np.nan)
        fares = np.asarray(fares, dtype=float).reshape(n, N_MONTHS)
        if destinations.shape != (n,):
            raise ValueError("origins and destinations differ in length")
        if np.any(passengers < 0) or np.any(fares < 0):
            raise ValueError("passengers and fares must be non-negative")
        if np.any(np.isinf(passengers)) or np.any(np.isinf(fares)):
            raise ValueError("passengers and fares must be finite")
        for code in np.unique(np.concatenate([origins, destinations])).tolist():
            check_airport_code(code)
        if n and np.any(origins == destinations):
            raise ValueError("routes with origin == destination")
        order = np.lexsort((destinations, origins))
        origins, destinations = origins[order], destinations[order]
        if n > 1:
            dup = (origins[1:] == origins[:-1]) & (destinations[1:] == destinations[:-1])
            if dup.any():
                i = int(np.flatnonzero(dup)[0])
                raise ValueError(f"duplicate route {origins[i]}-{destinations[i]}")
        self.origins = _readonly(origins)
        self.destinations = _readonly(destinations)
        self.passengers = _readonly(passengers[order])
        self.fares = _readonly(fares[order])
        if airports is None:
            airports = {}
        elif not isinstance(airports, Mapping):
            airports = {a.code: a for a in airports}
        self.airports: Mapping[str, AirportRef] = dict(airports)

    def __len__(self):
        return self.origins.shape[0]

    def __repr__(self):
        return f"RouteCorpus(n_routes={len(self)}, n_airports={len(self.airports)})"

    def __eq__(self, other):
        if not isinstance(other, RouteCorpus):
            return NotImplemented
        return (
            np.array_equal(self.origins, other.origins)
            and np.array_equal(self.destinations, other.destinations)
            and np.array_equal(self.passengers, other.passengers, equal_nan=True)
            and np.array_equal(self.fares, other.fares, equal_nan=True)
            and self.airports == other.airports
        )

    __hash__ = None

    @cached_property
    def max_monthly_passengers(self) -> np.ndarray:
        """Per-route ``maxP`` (0 for a route without observations)."""
        if not len(self):
            return _readonly(np.zeros(0, dtype=np.int64))
        peak = np.fmax.reduce(self.passengers, axis=1)
        return _readonly(np.nan_to_num(peak, nan=0.0).astype(np.int64))

    @cached_property
    def _index(self) -> dict[tuple[str, str], int]:
        return {(o, d): i for i, (o, d) in enumerate(zip(self.origins.tolist(), self.destinations.tolist()))}

    @property
    def keys(self) -> list[RouteKey]:
        return [RouteKey(o, d) for o, d in zip(self.origins.tolist(), self.destinations.tolist())]

    def index_of(self, key: RouteKey) -> int:
        try:
            return self._index[(key.origin, key.destination)]
        except KeyError:
            raise KeyError(str(key)) from None

    def __contains__(self, key):
        return (key.origin, key.destination) in self._index

    def series(self, key: RouteKey) -> RouteSeries:
        return self._series_at(self.index_of(key))

    def _series_at(self, i) -> RouteSeries:
        pax, fare = self.passengers[i], self.fares[i]
        obs = []
        for col in np.flatnonzero(~np.isnan(pax)):
            year, month = index_month(col)
            f = fare[col]
            obs.append(MonthlyObservation(year, month, int(pax[col]), None if np.isnan(f) else float(f)))
        return RouteSeries(RouteKey(str(self.origins[i]), str(self.destinations[i])), tuple(obs))

    def __iter__(self) -> Iterator[RouteSeries]:
        for i in range(len(self)):
            yield self._series_at(i)

    def take(self, mask_or_index) -> "RouteCorpus":
        """Sub-corpus of the selected routes; airports are kept whole."""
        sel = np.asarray(mask_or_index)
        return RouteCorpus(
            self.origins[sel], self.destinations[sel], self.passengers[sel], self.fares[sel], self.airports
        )

    @cached_property
    def unresolved(self) -> np.ndarray:
        """Boolean per route: True when either endpoint is missing from ``airports``."""
        known = np.array(sorted(self.airports), dtype="<U3")
        ok = np.isin(self.origins, known) & np.isin(self.destinations, known)
        return _readonly(~ok)

    @classmethod
    def from_series(cls, series, airports=None) -> "RouteCorpus":
        series = list(series)
        pax = np.full((len(series), N_MONTHS), np.nan)
        fares = np.full((len(series), N_MONTHS), np.nan)
        for i, s in enumerate(series):
            for o in s.observations:
                col = month_index(o.year, o.month)
                pax[i, col] = o.passengers
                if o.avg_fare is not None:
                    fares[i, col] = o.avg_fare
        return cls(
            [s.key.origin for s in series], [s.key.destination for s in series], pax, fares, airports
        )


# ---------------------------------------------------------------- parsing


_INT_RE = r"\d+"
_FLOAT_RE = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"


def _read_table(path, header):
    path = Path(path)
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, na_filter=False, encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: unreadable: {exc}") from None
    except pd.errors.EmptyDataError:
        raise CorpusFormatError(path, 1, f"missing header, expected {','.join(header)}") from None
    except pd.errors.ParserError as exc:
        raise CorpusFormatError(path, None, f"malformed row: {exc}") from None
    if list(df.columns) != header:
        raise CorpusFormatError(path, 1, f"header must be {','.join(header)}, got {','.join(df.columns)}")
    return df


def _first_error(path, checks):
    """Raise for the earliest failing row among ``(bad_mask, message)`` checks."""
    first = None
    for bad, message in checks:
        hits = np.flatnonzero(np.asarray(bad))
        if hits.size and (first is None or hits[0] < first[0]):
            first = (int(hits[0]), message)
    if first is not None:
        row, message = first
        raise CorpusFormatError(path, row + 2, message)


def parse_airports(path) -> dict[str, AirportRef]:
    df = _read_table(path, AIRPORTS_HEADER)
    code, country = df["code"], df["country"]
    _first_error(
        path,
        [
            (~code.str.fullmatch(r"[A-Z]{3}"), "airport code must match [A-Z]{3}"),
            (~country.str.fullmatch(r"[A-Z]{2}"), "country must be an ISO alpha-2 code"),
            (code.duplicated(), "duplicate airport code"),
        ],
    )
    return {c: AirportRef(c, k, n) for c, k, n in zip(code, country, df["name"])}


def parse_route_corpus(series_file, airports_file=None) -> RouteCorpus:
    """Load the route series CSV and the airport reference CSV.

    Raises
    ------
    InputError
        The file cannot be read.
    CorpusFormatError
        A row is malformed, a code is invalid, an observation is duplicated
        or falls outside January 2010 - October 2019. The message carries
        the 1-based line number.
    """
    airports = parse_airports(airports_file) if airports_file is not None else {}
    path = Path(series_file)
    df = _read_table(path, SERIES_HEADER)
    origin, dest = df["origin"], df["dest"]
    year_s, month_s, pax_s, fare_s = df["year"], df["month"], df["passengers"], df["avg_fare"]
    _first_error(
        path,
        [
            (~origin.str.fullmatch(r"[A-Z]{3}"), "origin must match [A-Z]{3}"),
            (~dest.str.fullmatch(r"[A-Z]{3}"), "dest must match [A-Z]{3}"),
            (origin == dest, "origin equals dest"),
            (~year_s.str.fullmatch(_INT_RE), "year is not an integer"),
            (~month_s.str.fullmatch(_INT_RE), "month is not an integer"),
            (pax_s == "", "passengers missing"),
            (~pax_s.str.fullmatch(_INT_RE) & (pax_s != ""), "passengers is not a non-negative integer"),
            (~fare_s.str.fullmatch(_FLOAT_RE) & (fare_s != ""), "avg_fare is not a non-negative number"),
        ],
    )
    year = year_s.to_numpy(dtype=np.int64) if len(df) else np.zeros(0, np.int64)
    month = month_s.to_numpy(dtype=np.int64) if len(df) else np.zeros(0, np.int64)
    in_range = (month >= 1) & (month <= 12) & (year >= FIRST_YEAR)
    in_range &= (year < LAST_YEAR) | ((year == LAST_YEAR) & (month <= LAST_MONTH))
    _first_error(path, [(~in_range, "observation outside Jan 2010 - Oct 2019")])

    pax = pax_s.to_numpy(dtype=float) if len(df) else np.zeros(0)
    fare = np.where(fare_s == "", "nan", fare_s).astype(float) if len(df) else np.zeros(0)
    _first_error(path, [(~np.isfinite(pax), "passengers out of range")])

    keys = (origin + dest).to_numpy(dtype="<U6")
    uniq, route = np.unique(keys, return_inverse=True)
    col = month_index(year, month)
    cell = route.astype(np.int64) * N_MONTHS + col
    _first_error(path, [(pd.Series(cell).duplicated().to_numpy(), "duplicate (route, year, month) observation")])

    passengers = np.full((uniq.size, N_MONTHS), np.nan)
    fares = np.full((uniq.size, N_MONTHS), np.nan)
    passengers[route, col] = pax
    fares[route, col] = fare
    origins = np.array([k[:3] for k in uniq.tolist()], dtype="<U3")
    dests = np.array([k[3:] for k in uniq.tolist()], dtype="<U3")
    return RouteCorpus(origins, dests, passengers, fares, airports)


def write_route_corpus(corpus: RouteCorpus, series_file, airports_file=None) -> None:
    """Serialize ``corpus`` to the CSV formats read by :func:`parse_route_corpus`."""
    route, col = np.nonzero(~np.isnan(corpus.passengers))
    years = FIRST_YEAR + col // 12
    months = col % 12 + 1
    frame = pd.DataFrame(
        {
            "origin": corpus.origins[route],
            "dest": corpus.destinations[route],
            "year": years,
            "month": months,
            "passengers": corpus.passengers[route, col].astype(np.int64),
            "avg_fare": corpus.fares[route, col],
        },
        columns=SERIES_HEADER,
    )
    with atomic_write(series_file) as fh:
        frame.to_csv(fh, index=False, lineterminator="\n", na_rep="")
    if airports_file is not None:
        write_airports(corpus.airports, airports_file)


def write_airports(airports: Mapping[str, AirportRef], path) -> None:
    with atomic_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AIRPORTS_HEADER)
        for code in sorted(airports):
            a = airports[code]
            writer.writerow([a.code, a.country, a.name])


# ---------------------------------------------------------------- filtering


def filter_frequent(corpus: RouteCorpus, threshold: int) -> RouteCorpus:
    """Keep the routes whose maximal monthly volume is at least ``threshold``."""
    threshold = check_non_negative_int(threshold, "threshold")
    return corpus.take(corpus.max_monthly_passengers >= threshold)


def yearly_passengers(corpus: RouteCorpus, year: int) -> np.ndarray:
    if not FIRST_YEAR <= year <= LAST_YEAR:
        raise ValueError(f"year must be within {FIRST_YEAR}..{LAST_YEAR}, got {year}")
    start = month_index(year, 1)
    return np.nansum(corpus.passengers[:, start:start + 12], axis=1)


def passenger_share(corpus: RouteCorpus, subset: RouteCorpus, year: int) -> float:
    """Fraction of ``corpus`` passengers in ``year`` carried by ``subset`` routes."""
    missing = [k for k in subset.keys if k not in corpus]
    if missing:
        raise ValueError(f"subset route {missing[0]} is not in the corpus")
    total = float(yearly_passengers(corpus, year).sum())
    part = float(yearly_passengers(subset, year).sum())
    if total == 0.0:
        return 1.0 if part == 0.0 else float("nan")
    return part / total


# ---------------------------------------------------------------- synthetic data


@dataclass(frozen=True)
class SyntheticProfile:
    """Growth and seasonality of generated routes.

    Monthly means are ``base * (1 + growth * (year - 2010))**2 * season[month]``.
    ``base_spread`` is the log-sd of a per-route scale factor (0 keeps every
    route on the same mean); ``fare_noise`` is the relative sd of fares.
    """

    base: float = 1000.0
    growth: float = 0.05
    season: tuple[float, ...] = (0.85, 0.8, 0.95, 1.0, 1.0, 1.1, 1.25, 1.25, 1.0, 0.95, 0.85, 1.0)
    fare_base: float = 150.0
    base_spread: float = 0.0
    fare_noise: float = 0.0

    def __post_init__(self):
        check_real(self.base, "base", minimum=0.0)
        check_real(self.fare_base, "fare_base", minimum=0.0)
        check_real(self.base_spread, "base_spread", minimum=0.0)
        check_real(self.fare_noise, "fare_noise", minimum=0.0)
        if len(self.season) != 12 or any(s < 0 for s in self.season):
            raise ValueError("season needs 12 non-negative factors")
        if any(1 + self.growth * t < 0 for t in range(10)):
            raise ValueError("growth makes the trend negative inside the data window")

    def means(self) -> np.ndarray:
        """Expected monthly passengers on the 118-month grid (unit route scale)."""
        col = np.arange(N_MONTHS)
        t = col // 12
        return self.base * (1.0 + self.growth * t) ** 2 * np.asarray(self.season)[col % 12]

    def mean_at(self, year, month) -> float:
        t = year - FIRST_YEAR
        return self.base * (1.0 + self.growth * t) ** 2 * self.season[month - 1]


def load_synthetic_profile(path) -> SyntheticProfile:
    values = read_keyvalue(path)
    default = SyntheticProfile()
    src = str(path)
    try:
        return SyntheticProfile(
            base=get_float(values, "base", default.base, source=src),
            growth=get_float(values, "growth", default.growth, source=src),
            season=tuple(
                get_float(values, f"season_{m}", default.season[m - 1], source=src) for m in range(1, 13)
            ),
            fare_base=get_float(values, "fare_base", default.fare_base, source=src),
            base_spread=get_float(values, "base_spread", default.base_spread, source=src),
            fare_noise=get_float(values, "fare_noise", default.fare_noise, source=src),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{src}: {exc}") from None


SYNTHETIC_COUNTRIES = ("IT", "DE", "FR", "ES", "NL", "US", "CN", "GB", "JP", "BR", "IN", "AE")
_LETTERS = np.array(list("ABCDEFGHIJKLMNOPQRSTUVWXYZ"))


def _airport_codes(n):
    idx = np.arange(n)
    # stride coprime with 26**3 so consecutive airports do not share prefixes
    idx = (idx * 7919) % 26**3
    return np.char.add(np.char.add(_LETTERS[idx // 676], _LETTERS[(idx // 26) % 26]), _LETTERS[idx % 26])


def generate_synthetic_corpus(seed: int, n_routes: int, profile: SyntheticProfile | None = None,
                              countries=SYNTHETIC_COUNTRIES) -> RouteCorpus:
    """Deterministic synthetic corpus with Poisson monthly counts.

    Every route carries a full 118-month history. Airports are assigned
    countries round-robin from ``countries``.
    """
    n_routes = check_positive_int(n_routes, "n_routes")
    profile = profile or SyntheticProfile()
    rng = np.random.default_rng(seed)
    n_airports = 2
    while n_airports * (n_airports - 1) < n_routes:
        n_airports += 1
    if n_airports > 26**3:
        raise ValueError("n_routes exceeds the number of distinct airport pairs")
    codes = _airport_codes(n_airports)
    pick = np.sort(rng.choice(n_airports * (n_airports - 1), size=n_routes, replace=False))
    o_idx = pick // (n_airports - 1)
    d_idx = pick % (n_airports - 1)
    d_idx = d_idx + (d_idx >= o_idx)

    scale = np.ones(n_routes)
    if profile.base_spread > 0:
        s = profile.base_spread
        scale = np.exp(rng.normal(-0.5 * s * s, s, size=n_routes))
    means = scale[:, None] * profile.means()[None, :]
    passengers = rng.poisson(means).astype(float)

    t = (np.arange(N_MONTHS) // 12)[None, :]
    fares = profile.fare_base * (1.0 + 0.02 * t) * np.ones((n_routes, 1))
    if profile.fare_noise > 0:
        fares = fares * (1.0 + profile.fare_noise * rng.standard_normal(fares.shape))
    fares = np.round(np.clip(fares, 0.0, None), 2)

    airports = {
        str(c): AirportRef(str(c), countries[i % len(countries)], f"Synthetic {c}") for i, c in enumerate(codes)
    }
    return RouteCorpus(codes[o_idx], codes[d_idx], passengers, fares, airports)
