"""Ticketing-revenue losses and their proportional job and GDP impact."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ._config import get_float, read_keyvalue
from ._io import atomic_write
from ._validation import check_real
from .errors import ConfigError
from .forecast import N_TARGETS, TARGET_MONTHS, ForecastSet
from .regions import RegionFilter

PERIODS = ("Q1", "Q2", "Q3", "Q4", "Yearly")
CATEGORIES = ("tourism_catalytic", "induced", "indirect", "direct")
LOSS_HEADER = [
    "region", "scenario", "period", "revenue_loss_musd", "loss_share", "jobs_lost_m", "gdp_lost_busd",
    "economy_gdp_share",
]
_COLS_2020 = np.array([j for j, (y, _) in enumerate(TARGET_MONTHS) if y == 2020])


@dataclass(frozen=True)
class EconomyProfile:
    """Jobs (millions) and GDP (US$ billions) supported by aviation in an economy.

    ``jobs_share_printed`` and ``gdp_share_printed`` keep the category shares
    as published, which may differ from the ratios of the counts.
    ``as_printed`` records published figures that the profile amends.
    """

    name: str
    jobs_total: float
    jobs_split: tuple[float, float, float, float]
    aviation_gdp_total: float
    gdp_split: tuple[float, float, float, float]
    economy_gdp: float
    jobs_share_printed: tuple[float, ...] | None = None
    gdp_share_printed: tuple[float, ...] | None = None
    as_printed: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        check_real(self.jobs_total, "jobs_total", minimum=0.0, strict=True)
        check_real(self.aviation_gdp_total, "aviation_gdp_total", minimum=0.0, strict=True)
        check_real(self.economy_gdp, "economy_gdp", minimum=0.0, strict=True)
        for label, split, total in (("jobs", self.jobs_split, self.jobs_total),
                                    ("gdp", self.gdp_split, self.aviation_gdp_total)):
            if len(split) != 4 or any(v < 0 for v in split):
                raise ValueError(f"{self.name}: {label} split needs 4 non-negative values")
            if abs(sum(split) - total) > 0.005 * total:
                raise ValueError(
                    f"{self.name}: {label} categories sum to {sum(split):.2f}, total is {total:.2f} (>0.5% apart)"
                )

    def tourism_fractions(self) -> dict[str, float]:
        """Tourism-catalytic share of jobs and GDP, computed and as published."""
        out = {
            "jobs": self.jobs_split[0] / self.jobs_total,
            "gdp": self.gdp_split[0] / self.aviation_gdp_total,
        }
        if self.jobs_share_printed:
            out["jobs_printed"] = self.jobs_share_printed[0]
        if self.gdp_share_printed:
            out["gdp_printed"] = self.gdp_share_printed[0]
        if "jobs_tourism_catalytic" in self.as_printed:
            out["jobs_as_printed_count"] = self.as_printed["jobs_tourism_catalytic"] / self.jobs_total
        return out


def load_profile(name_or_path) -> EconomyProfile:
    """Load a bundled profile (``world``, ``eu27``) or a profile file."""
    path = Path(name_or_path)
    if not path.exists():
        bundled = resources.files("airban") / "data" / "profiles" / f"{str(name_or_path).lower()}.cfg"
        if not bundled.is_file():
            raise ValueError(f"unknown economy profile {name_or_path!r}")
        with resources.as_file(bundled) as p:
            return _profile_from_values(read_keyvalue(p), str(name_or_path))
    return _profile_from_values(read_keyvalue(path), str(path))


def _profile_from_values(values, source) -> EconomyProfile:
    def shares(prefix):
        keys = [f"{prefix}_share_{c}" for c in CATEGORIES]
        if not any(k in values for k in keys):
            return None
        return tuple(get_float(values, k, source=source) for k in keys)

    as_printed = {
        k[: -len("_as_printed")]: get_float(values, k, source=source) for k in values if k.endswith("_as_printed")
    }
    try:
        return EconomyProfile(
            name=values.get("name", Path(source).stem),
            jobs_total=get_float(values, "jobs_total", source=source),
            jobs_split=tuple(get_float(values, f"jobs_{c}", source=source) for c in CATEGORIES),
            aviation_gdp_total=get_float(values, "aviation_gdp_total", source=source),
            gdp_split=tuple(get_float(values, f"gdp_{c}", source=source) for c in CATEGORIES),
            economy_gdp=get_float(values, "economy_gdp", source=source),
            jobs_share_printed=shares("jobs"),
            gdp_share_printed=shares("gdp"),
            as_printed=as_printed,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{source}: {exc}") from None


# ---------------------------------------------------------------- revenue and losses


def monthly_revenue(forecasts: ForecastSet, region: RegionFilter, airports: Mapping) -> np.ndarray:
    """Expected ticketing revenue (US$) per forecast month over in-region routes."""
    if region.countries:
        region.check_countries(airports)
    rows = region.member_mask(forecasts.origins, forecasts.destinations, airports)
    revenue = forecasts.passengers[rows] * forecasts.fares[rows]
    return revenue.sum(axis=0) if revenue.size else np.zeros(N_TARGETS)


def revenue_loss(baseline, scenario) -> np.ndarray:
    """Per-month ``max(0, baseline - scenario)``."""
    baseline = np.asarray(baseline, dtype=float)
    scenario = np.asarray(scenario, dtype=float)
    if baseline.shape != scenario.shape:
        raise ValueError(f"horizon mismatch: {baseline.shape} vs {scenario.shape}")
    return np.maximum(baseline - scenario, 0.0)


def _months_2020(values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape == (N_TARGETS,):
        return values[_COLS_2020]
    if values.shape == (12,):
        return values
    raise ValueError(f"expected 12 monthly values for 2020 or {N_TARGETS} forecast months, got {values.shape}")


def annual_baseline_revenue(baseline_revenue) -> float:
    return float(_months_2020(baseline_revenue).sum())


@dataclass(frozen=True)
class QuarterlyLoss:
    """Revenue loss (US$ millions) and loss share per quarter and for the year."""

    revenue_loss: np.ndarray
    loss_share: np.ndarray
    annual_baseline: float | None = None

    @classmethod
    def from_shares(cls, quarterly_shares, annual_baseline=None) -> "QuarterlyLoss":
        """Build from four quarterly shares (yearly is their sum)."""
        q = np.asarray(quarterly_shares, dtype=float)
        if q.shape != (4,):
            raise ValueError("need four quarterly shares")
        shares = np.append(q, q.sum())
        losses = shares * annual_baseline / 1e6 if annual_baseline else np.full(5, np.nan)
        return cls(losses, shares, annual_baseline)


def quarterly_loss_table(losses, annual_baseline_revenue: float) -> QuarterlyLoss:
    """Aggregate monthly 2020 losses (US$) into quarters.

    Shares are losses over the *annual* baseline revenue of 2020.
    """
    baseline = check_real(annual_baseline_revenue, "annual_baseline_revenue", minimum=0.0, strict=True)
    monthly = _months_2020(losses)
    quarters = monthly.reshape(4, 3).sum(axis=1)
    per_period = np.append(quarters, quarters.sum())
    return QuarterlyLoss(per_period / 1e6, per_period / baseline, baseline)


@dataclass(frozen=True)
class LossTable:
    region: str
    scenario: str
    profile: str
    revenue_loss: np.ndarray
    loss_share: np.ndarray
    jobs_lost: np.ndarray
    gdp_lost: np.ndarray
    economy_gdp_share: np.ndarray

    def rows(self):
        for i, period in enumerate(PERIODS):
            yield (period, float(self.revenue_loss[i]), float(self.loss_share[i]), float(self.jobs_lost[i]),
                   float(self.gdp_lost[i]), float(self.economy_gdp_share[i]))

    def row(self, period: str) -> dict[str, float]:
        i = PERIODS.index(period)
        return {
            "revenue_loss": float(self.revenue_loss[i]),
            "loss_share": float(self.loss_share[i]),
            "jobs_lost": float(self.jobs_lost[i]),
            "gdp_lost": float(self.gdp_lost[i]),
            "economy_gdp_share": float(self.economy_gdp_share[i]),
        }


def socio_impact(quarterly: QuarterlyLoss, profile: EconomyProfile, *, pass_through: float = 1.0,
                 region: str = "global", scenario: str = "") -> LossTable:
    """Jobs and GDP lost, proportional to the ticketing loss share.

    ``pass_through`` scales how much of the revenue reduction carries over
    to jobs and GDP (1.0 = fully proportional).
    """
    pass_through = check_real(pass_through, "pass_through", minimum=0.0)
    shares = np.asarray(quarterly.loss_share, dtype=float)
    q = shares[:4] * pass_through
    jobs = np.append(q * profile.jobs_total, (q * profile.jobs_total).sum())
    gdp = np.append(q * profile.aviation_gdp_total, (q * profile.aviation_gdp_total).sum())
    return LossTable(
        region=region,
        scenario=scenario,
        profile=profile.name,
        revenue_loss=np.asarray(quarterly.revenue_loss, dtype=float),
        loss_share=shares,
        jobs_lost=jobs,
        gdp_lost=gdp,
        economy_gdp_share=gdp / profile.economy_gdp,
    )


def tourism_component(table: LossTable, profile: EconomyProfile, *, use_printed_share: bool = False) -> LossTable:
    """Restrict job and GDP losses to the tourism-catalytic category."""
    fr = profile.tourism_fractions()
    jobs_f = fr.get("jobs_printed", fr["jobs"]) if use_printed_share else fr["jobs"]
    gdp_f = fr.get("gdp_printed", fr["gdp"]) if use_printed_share else fr["gdp"]
    gdp = table.gdp_lost * gdp_f
    return replace(
        table,
        profile=f"{table.profile}:tourism",
        jobs_lost=table.jobs_lost * jobs_f,
        gdp_lost=gdp,
        economy_gdp_share=gdp / profile.economy_gdp,
    )


def scenario_loss_table(baseline: ForecastSet, adjusted: ForecastSet, region: RegionFilter, airports: Mapping,
                        profile: EconomyProfile, *, scenario: str = "", pass_through: float = 1.0) -> LossTable:
    """Baseline vs scenario forecasts straight to a :class:`LossTable`."""
    base_rev = monthly_revenue(baseline, region, airports)
    scen_rev = monthly_revenue(adjusted, region, airports)
    annual = annual_baseline_revenue(base_rev)
    if annual <= 0:
        raise ValueError(f"region {region.name}: baseline revenue for 2020 is zero")
    quarterly = quarterly_loss_table(revenue_loss(base_rev, scen_rev), annual)
    return socio_impact(quarterly, profile, pass_through=pass_through, region=region.name, scenario=scenario)


# ---------------------------------------------------------------- back-solving published tables


@dataclass(frozen=True)
class BaselineEstimate:
    value: float
    low: float
    high: float
    point_estimates: tuple[float, ...]


def backsolve_annual_baseline(pairs: Sequence[tuple[float, float]], decimals: int = 1) -> BaselineEstimate:
    """Annual baseline revenue implied by published ``(loss, share %)`` pairs.

    Each pair bounds the baseline to ``loss / (share +- half a printed
    unit)``. The estimate is the midpoint of the intersection of all bounds.
    """
    half = 0.5 * 10.0 ** (-decimals)
    lows, highs, points = [], [], []
    for loss, pct in pairs:
        if pct <= half:
            raise ValueError(f"share {pct}% is too coarse to bound the baseline")
        lows.append(loss / ((pct + half) / 100))
        highs.append(loss / ((pct - half) / 100))
        points.append(loss / (pct / 100))
    lo, hi = max(lows), min(highs)
    if lo > hi:
        raise ValueError("published pairs are mutually inconsistent")
    return BaselineEstimate((lo + hi) / 2, lo, hi, tuple(points))


# ---------------------------------------------------------------- export


def write_loss_tables(tables: Sequence[LossTable], path) -> None:
    with atomic_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LOSS_HEADER)
        for t in tables:
            for period, loss, share, jobs, gdp, eshare in t.rows():
                writer.writerow([t.region, t.scenario, period, repr(loss), repr(share), repr(jobs), repr(gdp),
                                 repr(eshare)])


def format_loss_tables(tables: Sequence[LossTable]) -> str:
    """Side-by-side text table, one column per scenario.

    Rows: loss in US$ millions with its share, then jobs (millions), GDP
    (US$ billions) and share of economy GDP.
    """
    if not tables:
        return ""
    names = [t.scenario or "-" for t in tables]
    width = max(12, *(len(n) + 2 for n in names))
    head = f"{'2020':<22}" + "".join(f"{n:>{width}}" for n in names)
    lines = [f"region: {tables[0].region}   profile: {tables[0].profile}", head, "-" * len(head)]

    def block(label, fmt, attr):
        for i, period in enumerate(PERIODS):
            cells = "".join(f"{fmt(getattr(t, attr)[i]):>{width}}" for t in tables)
            lines.append(f"{period + label:<22}{cells}")

    for i, period in enumerate(PERIODS):
        lines.append(f"{period:<22}" + "".join(f"{t.revenue_loss[i]:>{width},.1f}" for t in tables))
        lines.append(f"{'':<22}" + "".join(f"{'(' + format(t.loss_share[i], '.1%') + ')':>{width}}" for t in tables))
    lines.append("-" * len(head))
    block(" (jobs ml)", lambda v: f"{v:.2f}", "jobs_lost")
    lines.append("-" * len(head))
    block(" (GDP bl)", lambda v: f"{v:,.2f}", "gdp_lost")
    lines.append("-" * len(head))
    block(" (GDP %)", lambda v: f"{100 * v:.2f}", "economy_gdp_share")
    return "\n".join(lines) + "\n"
