"""Baseline forecasts: month-wise quadratic trends as a periodic Poisson intensity.

Each calendar month of each route gets its own regression of volume on
``(1, t, t**2)`` with ``t = year - 2010``. The twelve fitted curves form the
periodic intensity of a non-homogeneous Poisson process, whose mean is the
baseline forecast for November 2019 - December 2020.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._io import atomic_write
from ._validation import check_non_negative_int, check_positive_int
from .errors import InputError
from .ingest import FIRST_YEAR, N_MONTHS, RouteCorpus, RouteKey, RouteSeries

TARGET_MONTHS = ((2019, 11), (2019, 12)) + tuple((2020, m) for m in range(1, 13))
N_TARGETS = len(TARGET_MONTHS)
JAN_2020 = TARGET_MONTHS.index((2020, 1))
FORECAST_HEADER = ["origin", "dest", "year", "month", "expected_passengers", "expected_fare"]

QUADRATIC, MEAN, ZERO = "quadratic", "mean", "zero"
_FALLBACKS = (QUADRATIC, MEAN, ZERO)

# internal centring for the normal equations; coefficients are reported raw
_CENTER = 4.5
_SCALE = 4.5


def _poly(a, b, c, t):
    return a + b * t + c * t * t


@dataclass(frozen=True)
class MonthModel:
    """Quadratic trend for one calendar month: ``a + b*t + c*t**2``."""

    month: int
    coeffs: tuple[float, float, float]
    n_points: int
    fallback: str = QUADRATIC

    def __post_init__(self):
        if self.fallback not in _FALLBACKS:
            raise ValueError(f"unknown fallback {self.fallback!r}")
        if self.fallback == QUADRATIC and self.n_points < 3:
            raise ValueError("a quadratic fit needs at least 3 points")
        if self.fallback == ZERO and self.n_points != 0:
            raise ValueError("fallback 'zero' implies no points")


def _normal_equations(t, y, w):
    """Batched weighted least squares of ``y`` on ``(1, t, t**2)``.

    ``t`` has shape (K,), ``y`` and ``w`` shape (N, K) with ``w`` in {0, 1}.
    Sums are accumulated column by column so that every row's result is
    independent of how rows are batched. Returns raw coefficients (N, 3),
    point counts (N,) and per-row means (N,).
    """
    n_rows, n_cols = y.shape
    s = (np.asarray(t, dtype=float) - _CENTER) / _SCALE
    S = [np.zeros(n_rows) for _ in range(5)]
    T = [np.zeros(n_rows) for _ in range(3)]
    for k in range(n_cols):
        wk = w[:, k]
        yk = y[:, k] * wk
        sk = s[k]
        p = 1.0
        for j in range(5):
            S[j] += wk * p
            if j < 3:
                T[j] += yk * p
            p *= sk
    n = S[0]
    quad = n >= 3
    coef = np.zeros((n_rows, 3))
    if quad.any():
        A = np.stack(
            [np.stack([S[0], S[1], S[2]], -1), np.stack([S[1], S[2], S[3]], -1), np.stack([S[2], S[3], S[4]], -1)],
            axis=-2,
        )[quad]
        rhs = np.stack(T, axis=-1)[quad]
        alpha, beta, gamma = np.linalg.solve(A, rhs[..., None])[..., 0].T
        m, h = _CENTER, _SCALE
        coef[quad, 2] = gamma / (h * h)
        coef[quad, 1] = beta / h - 2.0 * gamma * m / (h * h)
        coef[quad, 0] = alpha - beta * m / h + gamma * m * m / (h * h)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(n > 0, T[0] / n, 0.0)
    return coef, n.astype(np.int64), mean


def fit_month_model(points, month: int = 1) -> MonthModel:
    """Fit one calendar month's trend from ``(year_index, value)`` points.

    Three or more points give the least-squares quadratic; one or two points
    fall back to their mean; no points give the zero model.
    """
    pts = sorted((float(t), float(v)) for t, v in points)
    ts = [t for t, _ in pts]
    if len(set(ts)) != len(ts):
        raise ValueError("duplicate yearIndex in month points")
    if any(v < 0 or not np.isfinite(v) for _, v in pts):
        raise ValueError("month values must be finite and non-negative")
    if not pts:
        return MonthModel(month, (0.0, 0.0, 0.0), 0, ZERO)
    y = np.array([[v for _, v in pts]])
    coef, n, mean = _normal_equations(np.array(ts), y, np.ones_like(y))
    if n[0] >= 3:
        return MonthModel(month, tuple(float(c) for c in coef[0]), int(n[0]), QUADRATIC)
    return MonthModel(month, (float(mean[0]), 0.0, 0.0), int(n[0]), MEAN)


def predict_month(model: MonthModel, year_index: int) -> float:
    """Evaluate ``model`` at ``year_index``, clamped at zero."""
    year_index = check_non_negative_int(year_index, "year_index")
    a, b, c = model.coeffs
    return max(0.0, float(_poly(a, b, c, float(year_index))))


# ---------------------------------------------------------------- forecast containers


@dataclass(frozen=True)
class ForecastMonth:
    year: int
    month: int
    expected_passengers: float
    expected_fare: float


@dataclass(frozen=True)
class RouteForecast:
    key: RouteKey
    months: tuple[ForecastMonth, ...]

    def __post_init__(self):
        if tuple((m.year, m.month) for m in self.months) != TARGET_MONTHS:
            raise ValueError("a route forecast covers exactly Nov 2019 - Dec 2020")
        for m in self.months:
            if not (m.expected_passengers >= 0 and m.expected_fare >= 0):
                raise ValueError(f"{self.key} {m.year}-{m.month:02d}: negative or NaN forecast")

    @property
    def passengers(self) -> np.ndarray:
        return np.array([m.expected_passengers for m in self.months])

    @property
    def fares(self) -> np.ndarray:
        return np.array([m.expected_fare for m in self.months])

    @classmethod
    def from_arrays(cls, key, passengers, fares) -> "RouteForecast":
        return cls(
            key,
            tuple(
                ForecastMonth(y, m, float(p), float(f)) for (y, m), p, f in zip(TARGET_MONTHS, passengers, fares)
            ),
        )

    def replace_passengers(self, passengers) -> "RouteForecast":
        return RouteForecast.from_arrays(self.key, passengers, self.fares)


class ForecastSet:
    """Column-wise forecasts for many routes, ordered by route key."""

    def __init__(self, origins, destinations, passengers, fares):
        self.origins = np.asarray(origins, dtype="<U3").reshape(-1)
        self.destinations = np.asarray(destinations, dtype="<U3").reshape(-1)
        n = self.origins.shape[0]
        self.passengers = np.asarray(passengers, dtype=float).reshape(n, N_TARGETS)
        self.fares = np.asarray(fares, dtype=float).reshape(n, N_TARGETS)
        order = np.lexsort((self.destinations, self.origins))
        if not np.array_equal(order, np.arange(n)):
            self.origins, self.destinations = self.origins[order], self.destinations[order]
            self.passengers, self.fares = self.passengers[order], self.fares[order]
        for arr in (self.origins, self.destinations, self.passengers, self.fares):
            arr.setflags(write=False)

    def __len__(self):
        return self.origins.shape[0]

    def __repr__(self):
        return f"ForecastSet(n_routes={len(self)})"

    def __eq__(self, other):
        if not isinstance(other, ForecastSet):
            return NotImplemented
        return (
            np.array_equal(self.origins, other.origins)
            and np.array_equal(self.destinations, other.destinations)
            and np.array_equal(self.passengers, other.passengers)
            and np.array_equal(self.fares, other.fares)
        )

    __hash__ = None

    @property
    def keys(self) -> list[RouteKey]:
        return [RouteKey(o, d) for o, d in zip(self.origins.tolist(), self.destinations.tolist())]

    def route(self, key: RouteKey) -> RouteForecast:
        hit = np.flatnonzero((self.origins == key.origin) & (self.destinations == key.destination))
        if not hit.size:
            raise KeyError(str(key))
        i = int(hit[0])
        return RouteForecast.from_arrays(key, self.passengers[i], self.fares[i])

    def __iter__(self):
        for i, key in enumerate(self.keys):
            yield RouteForecast.from_arrays(key, self.passengers[i], self.fares[i])

    def with_passengers(self, passengers) -> "ForecastSet":
        return ForecastSet(self.origins, self.destinations, passengers, self.fares)

    @classmethod
    def from_routes(cls, forecasts) -> "ForecastSet":
        forecasts = list(forecasts)
        return cls(
            [f.key.origin for f in forecasts],
            [f.key.destination for f in forecasts],
            np.array([f.passengers for f in forecasts]).reshape(len(forecasts), N_TARGETS),
            np.array([f.fares for f in forecasts]).reshape(len(forecasts), N_TARGETS),
        )

    def to_csv(self, path) -> None:
        with atomic_write(path) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(FORECAST_HEADER)
            for i, (o, d) in enumerate(zip(self.origins.tolist(), self.destinations.tolist())):
                pax, fare = self.passengers[i].tolist(), self.fares[i].tolist()
                for j, (y, m) in enumerate(TARGET_MONTHS):
                    writer.writerow([o, d, y, m, repr(pax[j]), repr(fare[j])])


def read_forecast_csv(path) -> ForecastSet:
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: unreadable: {exc}") from None
    rows: dict[tuple[str, str], dict[tuple[int, int], tuple[float, float]]] = {}
    with fh:
        reader = csv.reader(fh)
        if next(reader, None) != FORECAST_HEADER:
            raise InputError(f"{path}:1: header must be {','.join(FORECAST_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                o, d, y, m, p, f = row
                rows.setdefault((o, d), {})[(int(y), int(m))] = (float(p), float(f))
            except ValueError:
                raise InputError(f"{path}:{lineno}: malformed forecast row") from None
    keys = sorted(rows)
    pax = np.zeros((len(keys), N_TARGETS))
    fares = np.zeros((len(keys), N_TARGETS))
    for i, k in enumerate(keys):
        months = rows[k]
        if set(months) != set(TARGET_MONTHS):
            raise InputError(f"{path}: route {k[0]}-{k[1]} does not cover Nov 2019 - Dec 2020")
        for j, ym in enumerate(TARGET_MONTHS):
            pax[i, j], fares[i, j] = months[ym]
    return ForecastSet([k[0] for k in keys], [k[1] for k in keys], pax, fares)


# ---------------------------------------------------------------- estimator


def _month_columns(month):
    """Corpus columns holding calendar ``month`` (1-12) and their year indices."""
    cols = np.arange(month - 1, N_MONTHS, 12)
    return cols, cols // 12


def _fit_chunk(passengers, fares):
    n = passengers.shape[0]
    p_coef = np.zeros((n, 12, 3))
    p_kind = np.zeros((n, 12), dtype=np.int8)
    p_npts = np.zeros((n, 12), dtype=np.int64)
    f_coef = np.zeros((n, 12, 3))
    f_kind = np.zeros((n, 12), dtype=np.int8)
    has_fare = ~np.isnan(fares)
    n_fare = has_fare.sum(axis=1)
    fare_total = np.zeros(n)
    for k in range(fares.shape[1]):
        fare_total += np.where(has_fare[:, k], fares[:, k], 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        route_fare = np.where(n_fare > 0, fare_total / n_fare, 0.0)
    for m in range(1, 13):
        cols, t = _month_columns(m)
        y = passengers[:, cols]
        w = (~np.isnan(y)).astype(float)
        coef, npts, mean = _normal_equations(t, np.nan_to_num(y), w)
        quad = npts >= 3
        coef[~quad] = 0.0
        coef[~quad, 0] = mean[~quad]
        p_coef[:, m - 1] = coef
        p_npts[:, m - 1] = npts
        p_kind[:, m - 1] = np.where(quad, 0, np.where(npts > 0, 1, 2))

        yf = fares[:, cols]
        wf = (~np.isnan(yf)).astype(float)
        fcoef, fn, _ = _normal_equations(t, np.nan_to_num(yf), wf)
        fquad = fn >= 3
        fcoef[~fquad] = 0.0
        fcoef[~fquad, 0] = route_fare[~fquad]
        f_coef[:, m - 1] = fcoef
        f_kind[:, m - 1] = np.where(fquad, 0, np.where(n_fare > 0, 1, 2))
    return p_coef, p_kind, p_npts, f_coef, f_kind


def _target_year_index():
    return np.array([float(y - FIRST_YEAR) for y, _ in TARGET_MONTHS])


def _target_calendar_month():
    return np.array([m - 1 for _, m in TARGET_MONTHS])


class BaselineForecaster(BaseEstimator):
    """Per-route periodic-intensity forecaster.

    Parameters
    ----------
    wuhan_origin_code : str or None, default="WUH"
        Routes departing this airport get their January 2020 forecast scaled
        by ``(wuhan_cutoff_day - 1) / wuhan_days_in_month``. ``None`` disables
        the adjustment.
    wuhan_cutoff_day : int, default=23
    wuhan_days_in_month : int, default=31
    n_jobs : int, default=1
        Worker threads for fitting. Results do not depend on this value.
    chunk_size : int, default=16384
        Routes per work unit.

    Attributes
    ----------
    passenger_coef_ : ndarray of shape (n_routes, 12, 3)
    passenger_fallback_ : ndarray of shape (n_routes, 12)
        0 quadratic, 1 mean, 2 zero.
    passenger_n_points_ : ndarray of shape (n_routes, 12)
    fare_coef_ : ndarray of shape (n_routes, 12, 3)
    fare_fallback_ : ndarray of shape (n_routes, 12)
        0 quadratic, 1 route mean fare, 2 no fare data.
    """

    def __init__(self, wuhan_origin_code="WUH", wuhan_cutoff_day=23, wuhan_days_in_month=31, n_jobs=1,
                 chunk_size=16384):
        self.wuhan_origin_code = wuhan_origin_code
        self.wuhan_cutoff_day = wuhan_cutoff_day
        self.wuhan_days_in_month = wuhan_days_in_month
        self.n_jobs = n_jobs
        self.chunk_size = chunk_size

    def _validate_params(self):
        check_positive_int(self.n_jobs, "n_jobs")
        check_positive_int(self.chunk_size, "chunk_size")
        check_positive_int(self.wuhan_days_in_month, "wuhan_days_in_month")
        check_positive_int(self.wuhan_cutoff_day, "wuhan_cutoff_day")
        if self.wuhan_cutoff_day > self.wuhan_days_in_month:
            raise ValueError("wuhan_cutoff_day exceeds wuhan_days_in_month")

    def fit(self, X: RouteCorpus, y=None):
        self._validate_params()
        if not isinstance(X, RouteCorpus):
            raise TypeError(f"expected a RouteCorpus, got {type(X).__name__}")
        n = len(X)
        bounds = [(lo, min(lo + self.chunk_size, n)) for lo in range(0, n, self.chunk_size)]

        def work(b):
            return _fit_chunk(X.passengers[b[0]:b[1]], X.fares[b[0]:b[1]])

        if self.n_jobs > 1 and len(bounds) > 1:
            with ThreadPoolExecutor(max_workers=self.n_jobs) as pool:
                parts = list(pool.map(work, bounds))
        else:
            parts = [work(b) for b in bounds]
        if parts:
            merged = [np.concatenate(p) for p in zip(*parts)]
        else:
            merged = [np.zeros((0, 12, 3)), np.zeros((0, 12), np.int8), np.zeros((0, 12), np.int64),
                      np.zeros((0, 12, 3)), np.zeros((0, 12), np.int8)]
        (self.passenger_coef_, self.passenger_fallback_, self.passenger_n_points_,
         self.fare_coef_, self.fare_fallback_) = merged
        self.origins_ = X.origins
        self.destinations_ = X.destinations
        self.n_routes_ = n
        return self

    def _evaluate(self, coef):
        c = coef[:, _target_calendar_month(), :]
        t = _target_year_index()[None, :]
        return np.maximum(_poly(c[..., 0], c[..., 1], c[..., 2], t), 0.0)

    def predict(self, X: RouteCorpus | None = None) -> ForecastSet:
        """Expected passengers and fares for November 2019 - December 2020."""
        check_is_fitted(self, "passenger_coef_")
        if X is not None and not (
            np.array_equal(X.origins, self.origins_) and np.array_equal(X.destinations, self.destinations_)
        ):
            raise ValueError("X does not hold the routes this forecaster was fitted on")
        passengers = self._evaluate(self.passenger_coef_)
        fares = self._evaluate(self.fare_coef_)
        if self.wuhan_origin_code is not None:
            rows = self.origins_ == self.wuhan_origin_code
            passengers[rows, JAN_2020] *= (self.wuhan_cutoff_day - 1) / self.wuhan_days_in_month
        return ForecastSet(self.origins_, self.destinations_, passengers, fares)

    def fit_predict(self, X, y=None) -> ForecastSet:
        return self.fit(X).predict()

    def month_model(self, key: RouteKey, month: int, signal="passengers") -> MonthModel:
        """The fitted :class:`MonthModel` of one route and calendar month."""
        check_is_fitted(self, "passenger_coef_")
        hit = np.flatnonzero((self.origins_ == key.origin) & (self.destinations_ == key.destination))
        if not hit.size:
            raise KeyError(str(key))
        i, m = int(hit[0]), month - 1
        if signal == "passengers":
            coef, kind, npts = self.passenger_coef_[i, m], self.passenger_fallback_[i, m], self.passenger_n_points_[i, m]
        elif signal == "fares":
            coef, kind = self.fare_coef_[i, m], self.fare_fallback_[i, m]
            npts = 3 if kind == 0 else 0
        else:
            raise ValueError(f"signal must be 'passengers' or 'fares', got {signal!r}")
        return MonthModel(month, tuple(float(c) for c in coef), int(npts), _FALLBACKS[int(kind)])


def forecast_route(series: RouteSeries) -> RouteForecast:
    """Baseline forecast of one route (no Wuhan adjustment)."""
    corpus = RouteCorpus.from_series([series])
    return BaselineForecaster(wuhan_origin_code=None).fit(corpus).predict().route(series.key)


def forecast_corpus(corpus: RouteCorpus, *, n_jobs=1, wuhan_origin_code="WUH", wuhan_cutoff_day=23) -> ForecastSet:
    return BaselineForecaster(
        wuhan_origin_code=wuhan_origin_code, wuhan_cutoff_day=wuhan_cutoff_day, n_jobs=n_jobs
    ).fit_predict(corpus)


def apply_wuhan_adjustment(forecast: RouteForecast, cutoff_day: int = 23, days_in_month: int = 31) -> RouteForecast:
    """Scale the January 2020 forecast to the days before ``cutoff_day``.

    The caller decides which routes qualify; the rescaling is applied to
    whatever forecast is passed in.
    """
    check_positive_int(days_in_month, "days_in_month")
    check_positive_int(cutoff_day, "cutoff_day")
    if cutoff_day > days_in_month:
        raise ValueError("cutoff_day exceeds days_in_month")
    passengers = forecast.passengers
    passengers[JAN_2020] *= (cutoff_day - 1) / days_in_month
    return forecast.replace_passengers(passengers)


# ---------------------------------------------------------------- sampling


@dataclass(frozen=True)
class PoissonSample:
    key: RouteKey
    draws: np.ndarray
    seed: int


def sample_poisson_paths(forecast: RouteForecast, n_paths: int, seed: int) -> PoissonSample:
    """Draw monthly counts, each Poisson with the forecast mean."""
    n_paths = check_positive_int(n_paths, "n_paths")
    rng = np.random.default_rng(seed)
    draws = rng.poisson(forecast.passengers[None, :], size=(n_paths, N_TARGETS))
    draws.setflags(write=False)
    return PoissonSample(forecast.key, draws, seed)
