"""Travel-ban scenarios: monthly multiplier curves and the observed-ban mask."""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._config import read_keyvalue
from ._io import atomic_write
from ._validation import check_fraction_vector
from .errors import ConfigError, InputError
from .forecast import N_TARGETS, TARGET_MONTHS, ForecastSet, RouteForecast
from .ingest import RouteKey
from .regions import RegionFilter

BUILTIN_NAMES = ("SARS", "MERS", "COVID-12", "COVID-L", "EUROC", "EUROC-12", "EUROC-L")
L_SHAPED = ("COVID-L", "EUROC-L")
SNAPSHOT_HEADER = ["origin", "dest", "snapshot_date", "horizon_days", "n_direct", "n_one_stop", "n_two_stop"]
MASK_HEADER = ["origin", "dest", "year", "month", "factor"]

# forecast columns holding January..December 2020
_COLS_2020 = np.array([j for j, (y, _) in enumerate(TARGET_MONTHS) if y == 2020])


@dataclass(frozen=True)
class ScenarioCurve:
    """Share of baseline volume retained in each month of 2020."""

    name: str
    multipliers: tuple[float, ...]
    pre2020_multiplier: float = field(default=1.0, init=False)

    def __post_init__(self):
        if not self.name:
            raise ValueError("a scenario curve needs a name")
        values = check_fraction_vector(self.multipliers, f"curve {self.name}", size=12, upper=2.0, warn_above=1.0)
        object.__setattr__(self, "multipliers", tuple(float(v) for v in values))

    @classmethod
    def null(cls) -> "ScenarioCurve":
        return cls("Baseline", (1.0,) * 12)

    def as_array(self) -> np.ndarray:
        return np.array(self.multipliers)

    @property
    def trough(self) -> float:
        return min(self.multipliers)


def piecewise_linear(anchors) -> np.ndarray:
    """Monthly values through ``(month, value)`` anchors, flat outside them."""
    months, values = zip(*sorted(anchors))
    return np.interp(np.arange(1, 13), months, values)


def load_curve(path) -> ScenarioCurve:
    """Read a curve file with ``name=`` and ``m1=`` .. ``m12=``."""
    values = read_keyvalue(path)
    unknown = set(values) - {"name"} - {f"m{i}" for i in range(1, 13)}
    if unknown:
        raise ConfigError(f"{path}: unexpected key(s) {', '.join(sorted(unknown))}")
    if "name" not in values:
        raise ConfigError(f"{path}: missing name")
    months = []
    for i in range(1, 13):
        key = f"m{i}"
        if key not in values:
            raise ConfigError(f"{path}: missing {key}")
        try:
            months.append(float(values[key]))
        except ValueError:
            raise ConfigError(f"{path}: {key}={values[key]!r} is not numeric") from None
    try:
        return ScenarioCurve(values["name"], tuple(months))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def write_curve(curve: ScenarioCurve, path) -> None:
    with atomic_write(path) as fh:
        fh.write(f"name={curve.name}\n")
        for i, v in enumerate(curve.multipliers, start=1):
            fh.write(f"m{i}={v!r}\n")


def builtin_curve(name: str, curve_dir=None) -> ScenarioCurve:
    """One of the shipped scenario curves, read from its config file.

    ``curve_dir`` points at a directory of recalibrated ``<name>.cfg`` files
    that take precedence over the bundled ones.
    """
    key = name.upper()
    if key not in BUILTIN_NAMES:
        raise ValueError(f"unknown scenario {name!r}; expected one of {', '.join(BUILTIN_NAMES)}")
    filename = f"{key.lower()}.cfg"
    if curve_dir is not None and (Path(curve_dir) / filename).exists():
        curve = load_curve(Path(curve_dir) / filename)
    else:
        with resources.as_file(resources.files("airban") / "data" / "curves" / filename) as p:
            curve = load_curve(p)
    if curve.name.upper() != key:
        raise ConfigError(f"{filename} declares name={curve.name}, expected {key}")
    check_fraction_vector(curve.multipliers, f"built-in curve {key}", size=12, upper=1.0)
    return curve


# ---------------------------------------------------------------- observed mask


@dataclass(frozen=True)
class AvailabilitySnapshot:
    """Bookable itineraries on a route over ``horizon_days`` from ``snapshot_date``."""

    key: RouteKey
    snapshot_date: dt.date
    horizon_days: int = 7
    n_direct: int = 0
    n_one_stop: int = 0
    n_two_stop: int = 0

    def __post_init__(self):
        if self.horizon_days < 1:
            raise ValueError("horizon_days must be >= 1")
        if min(self.n_direct, self.n_one_stop, self.n_two_stop) < 0:
            raise ValueError("flight counts must be non-negative")


def parse_snapshots(path) -> list[AvailabilitySnapshot]:
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: unreadable: {exc}") from None
    out = []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SNAPSHOT_HEADER:
            raise InputError(f"{path}:1: header must be {','.join(SNAPSHOT_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                o, d, date, horizon, direct, one, two = row
                out.append(
                    AvailabilitySnapshot(
                        RouteKey(o, d), dt.date.fromisoformat(date), int(horizon), int(direct), int(one), int(two)
                    )
                )
            except (ValueError, TypeError) as exc:
                raise InputError(f"{path}:{lineno}: malformed snapshot row: {exc}") from None
    return out


def write_snapshots(snapshots, path) -> None:
    with atomic_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SNAPSHOT_HEADER)
        for s in snapshots:
            writer.writerow([s.key.origin, s.key.destination, s.snapshot_date.isoformat(), s.horizon_days,
                             s.n_direct, s.n_one_stop, s.n_two_stop])


@dataclass(frozen=True)
class ObservedMask:
    """Route-month suppression factors (0 suppressed, 1 operating)."""

    entries: Mapping[tuple[RouteKey, int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if any(v not in (0.0, 1.0) for v in self.entries.values()):
            raise ValueError("mask factors must be 0 or 1")

    def __len__(self):
        return len(self.entries)

    def factor(self, key: RouteKey, year: int, month: int) -> float:
        return self.entries.get((key, year, month), 1.0)

    def zero_count(self, year: int, month: int) -> int:
        return sum(1 for (_, y, m), v in self.entries.items() if (y, m) == (year, month) and v == 0.0)

    def to_csv(self, path) -> None:
        with atomic_write(path) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(MASK_HEADER)
            for (key, y, m), v in sorted(self.entries.items()):
                writer.writerow([key.origin, key.destination, y, m, int(v)])


def read_mask_csv(path) -> ObservedMask:
    path = Path(path)
    entries = {}
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: unreadable: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        if next(reader, None) != MASK_HEADER:
            raise InputError(f"{path}:1: header must be {','.join(MASK_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                o, d, y, m, v = row
                entries[(RouteKey(o, d), int(y), int(m))] = float(v)
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: malformed mask row: {exc}") from None
    return ObservedMask(entries)


def _no_service(snapshot: AvailabilitySnapshot, predicate: str) -> bool:
    if predicate == "both":
        return snapshot.n_direct == 0 and snapshot.n_one_stop == 0
    if predicate == "either":
        return snapshot.n_direct == 0 or snapshot.n_one_stop == 0
    raise ValueError(f"predicate must be 'both' or 'either', got {predicate!r}")


def build_observed_mask(snapshots, predicate: str = "both") -> ObservedMask:
    """Zero a route-month when every snapshot taken in it shows no service.

    With ``predicate="both"`` a snapshot shows no service when it has neither
    direct nor one-stop itineraries; ``"either"`` suppresses when one of the
    two is missing. Route-months without snapshots get no entry.
    """
    suppressed: dict[tuple[RouteKey, int, int], bool] = {}
    for s in snapshots:
        cell = (s.key, s.snapshot_date.year, s.snapshot_date.month)
        suppressed[cell] = suppressed.get(cell, True) and _no_service(s, predicate)
    return ObservedMask({cell: 0.0 if off else 1.0 for cell, off in suppressed.items()})


# ---------------------------------------------------------------- application


def _curve_factors(curve: ScenarioCurve) -> np.ndarray:
    factors = np.full(N_TARGETS, curve.pre2020_multiplier)
    factors[_COLS_2020] = curve.as_array()
    return factors


def apply_scenario(forecast, curve: ScenarioCurve):
    """Scale 2020 volumes by ``curve``; earlier months and fares are unchanged."""
    factors = _curve_factors(curve)
    if isinstance(forecast, RouteForecast):
        return forecast.replace_passengers(forecast.passengers * factors)
    return forecast.with_passengers(forecast.passengers * factors[None, :])


def _mask_factors(keys_origin, keys_dest, mask: ObservedMask) -> np.ndarray:
    n = len(keys_origin)
    factors = np.ones((n, N_TARGETS))
    if not mask.entries:
        return factors
    index = {(o, d): i for i, (o, d) in enumerate(zip(keys_origin, keys_dest))}
    col_of = {ym: j for j, ym in enumerate(TARGET_MONTHS) if ym[0] == 2020}
    for (key, y, m), v in mask.entries.items():
        i = index.get((key.origin, key.destination))
        j = col_of.get((y, m))
        if i is not None and j is not None:
            factors[i, j] = v
    return factors


def apply_mask(forecast, mask: ObservedMask):
    """Multiply each 2020 month by its mask factor where one exists."""
    if isinstance(forecast, RouteForecast):
        f = _mask_factors([forecast.key.origin], [forecast.key.destination], mask)[0]
        return forecast.replace_passengers(forecast.passengers * f)
    f = _mask_factors(forecast.origins.tolist(), forecast.destinations.tolist(), mask)
    return forecast.with_passengers(forecast.passengers * f)


def apply_regional_scenario(forecasts: ForecastSet, assignments, airports, default=None) -> ForecastSet:
    """Apply a different curve per region.

    ``assignments`` is a sequence of ``(RegionFilter, ScenarioCurve)``; the
    first matching filter wins. Unmatched routes use ``default`` (unchanged
    when ``None``).
    """
    factors = np.ones((len(forecasts), N_TARGETS))
    taken = np.zeros(len(forecasts), dtype=bool)
    for region, curve in assignments:
        if not isinstance(region, RegionFilter):
            raise TypeError("assignments must pair RegionFilter with ScenarioCurve")
        rows = region.member_mask(forecasts.origins, forecasts.destinations, airports) & ~taken
        factors[rows] = _curve_factors(curve)
        taken |= rows
    if default is not None:
        factors[~taken] = _curve_factors(default)
    return forecasts.with_passengers(forecasts.passengers * factors)


class ScenarioAdjuster(BaseEstimator, TransformerMixin):
    """Transformer applying a scenario curve and/or an observed mask.

    Parameters
    ----------
    curve : ScenarioCurve or str or None
        A curve, or the name of a built-in one. ``None`` leaves volumes as is.
    mask : ObservedMask or None
    """

    def __init__(self, curve=None, mask=None):
        self.curve = curve
        self.mask = mask

    def fit(self, X=None, y=None):
        curve = self.curve
        if isinstance(curve, str):
            curve = builtin_curve(curve)
        self.curve_ = curve
        return self

    def transform(self, X):
        if not hasattr(self, "curve_"):
            self.fit()
        out = X
        if self.curve_ is not None:
            out = apply_scenario(out, self.curve_)
        if self.mask is not None:
            out = apply_mask(out, self.mask)
        return out

    @property
    def scenario_name(self) -> str:
        if self.curve is None:
            return "Observed" if self.mask is not None else "Baseline"
        return self.curve if isinstance(self.curve, str) else self.curve.name

