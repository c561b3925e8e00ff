"""Command-line entry point: ``airban <subcommand> [--config FILE] [flags]``.

Exit codes: 0 success, 1 input error, 2 validation error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import tracking
from ._config import read_keyvalue, split_list
from ._io import atomic_write
from .errors import ConfigError, InputError
from .forecast import TARGET_MONTHS, BaselineForecaster, ForecastSet, read_forecast_csv
from .impact import format_loss_tables, load_profile, scenario_loss_table, write_loss_tables
from .ingest import (
    filter_frequent,
    generate_synthetic_corpus,
    load_synthetic_profile,
    parse_airports,
    parse_route_corpus,
    passenger_share,
    write_route_corpus,
)
from .regions import parse_region
from .scenario import (
    BUILTIN_NAMES,
    apply_mask,
    apply_scenario,
    build_observed_mask,
    builtin_curve,
    load_curve,
    parse_snapshots,
)

log = logging.getLogger("airban")

OBSERVED = "Observed"
_COLS_2020 = [j for j, (y, _) in enumerate(TARGET_MONTHS) if y == 2020]


@dataclass
class RunConfig:
    corpus: Path | None = None
    airports: Path | None = None
    snapshots: Path | None = None
    departures: Path | None = None
    curves: list[Path] = field(default_factory=list)
    curve_dir: Path | None = None
    synth_profile: Path | None = None
    threshold: int = 50
    scenarios: list[str] = field(default_factory=lambda: list(BUILTIN_NAMES))
    regions: list[str] = field(default_factory=lambda: ["global"])
    profiles: list[str] = field(default_factory=lambda: ["world"])
    seed: int = 0
    output_dir: Path = Path("out")
    n_jobs: int = 1
    wuhan_cutoff_day: int = 23
    wuhan_origin_code: str = "WUH"
    mask_predicate: str = "both"
    pass_through: float = 1.0
    synth_routes: int = 1000
    group_by: str = "country"
    window_a: str = "2020-03-19..2020-03-25"
    window_b: str = "2020-01-30..2020-02-05"
    trend_window: str = "2020-01-01..2020-03-25"
    airline_window: str = "2020-02-15..2020-03-25"

    _PATHS = ("corpus", "airports", "snapshots", "departures", "curve_dir", "synth_profile", "output_dir")
    _INTS = ("threshold", "seed", "n_jobs", "wuhan_cutoff_day", "synth_routes")

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        values = read_keyvalue(path)
        cfg = cls()
        base = path.parent
        known = set(cls.__dataclass_fields__) - {"_PATHS", "_INTS"}
        for key, raw in values.items():
            if key not in known:
                raise ConfigError(f"{path}: unknown key {key!r}")
            cfg._set(key, raw, base)
        return cfg

    def _set(self, key, raw, base=Path(".")):
        try:
            if key in self._PATHS:
                value = base / raw
            elif key == "curves":
                value = [base / p for p in split_list(raw)]
            elif key in ("scenarios", "regions", "profiles"):
                value = split_list(raw)
            elif key in self._INTS:
                value = int(raw)
            elif key == "pass_through":
                value = float(raw)
            else:
                value = raw
        except ValueError:
            raise ConfigError(f"config key {key}: invalid value {raw!r}") from None
        setattr(self, key, value)

    def validate(self):
        if len(set(self.scenarios)) != len(self.scenarios):
            raise ConfigError("scenario names must be unique within a run")
        if self.threshold < 0:
            raise ConfigError("threshold must be >= 0")
        if self.mask_predicate not in ("both", "either"):
            raise ConfigError("mask_predicate must be 'both' or 'either'")
        for region in self.regions:
            parse_region(region)
        for profile in self.profiles:
            load_profile(profile)
        for p in (self.corpus, self.airports, self.snapshots, self.departures, *self.curves):
            if p is not None and not Path(p).exists():
                raise InputError(f"{p}: file not found")


# ---------------------------------------------------------------- pipeline steps


def _need(cfg, name):
    value = getattr(cfg, name)
    if value is None:
        raise ConfigError(f"no {name} file given (config key {name!r} or --{name})")
    return value


def load_corpus(cfg: RunConfig):
    corpus = parse_route_corpus(_need(cfg, "corpus"), cfg.airports)
    return filter_frequent(corpus, cfg.threshold)


def baseline_forecasts(cfg: RunConfig, corpus) -> ForecastSet:
    return BaselineForecaster(
        wuhan_origin_code=cfg.wuhan_origin_code or None,
        wuhan_cutoff_day=cfg.wuhan_cutoff_day,
        n_jobs=cfg.n_jobs,
    ).fit_predict(corpus)


def forecast_summary(forecasts: ForecastSet) -> dict:
    pax = forecasts.passengers[:, _COLS_2020]
    rev = pax * forecasts.fares[:, _COLS_2020]
    return {
        "routes": len(forecasts),
        "baseline_passengers_2020": float(pax.sum()),
        "baseline_revenue_2020_usd": float(rev.sum()),
    }


def resolve_scenarios(cfg: RunConfig):
    """Map each requested scenario name to a curve (or ``None`` for Observed)."""
    custom = {}
    for p in cfg.curves:
        curve = load_curve(p)
        custom[curve.name] = curve
    out = {}
    for name in cfg.scenarios:
        if name == OBSERVED:
            out[name] = None
        elif name in custom:
            out[name] = custom[name]
        elif name.upper() in BUILTIN_NAMES:
            out[name] = builtin_curve(name, cfg.curve_dir)
        else:
            raise ConfigError(f"unknown scenario {name!r}")
    return out


def scenario_forecasts(cfg: RunConfig, baseline: ForecastSet) -> dict[str, ForecastSet]:
    curves = resolve_scenarios(cfg)
    out = {}
    for name, curve in curves.items():
        if curve is None:
            snapshots = parse_snapshots(_need(cfg, "snapshots"))
            out[name] = apply_mask(baseline, build_observed_mask(snapshots, cfg.mask_predicate))
        else:
            out[name] = apply_scenario(baseline, curve)
    return out


def impact_tables(cfg: RunConfig, baseline: ForecastSet, scenarios: dict[str, ForecastSet], airports):
    regions = [parse_region(r) for r in cfg.regions]
    profiles = [load_profile(p) for p in cfg.profiles]
    tables = {}
    for region in regions:
        for profile in profiles:
            tables[region.name, profile.name] = [
                scenario_loss_table(baseline, adjusted, region, airports, profile, scenario=name,
                                    pass_through=cfg.pass_through)
                for name, adjusted in scenarios.items()
            ]
    return tables


def _slug(text):
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in text)


def _write_json(obj, path):
    with atomic_write(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_impact(out: Path, tables):
    flat = [t for group in tables.values() for t in group]
    write_loss_tables(flat, out / "impact" / "loss_tables.csv")
    for (region, profile), group in tables.items():
        with atomic_write(out / "impact" / f"{_slug(region)}__{_slug(profile)}.txt") as fh:
            fh.write(format_loss_tables(group))


# ---------------------------------------------------------------- subcommands


def cmd_ingest_check(cfg: RunConfig) -> int:
    corpus = parse_route_corpus(_need(cfg, "corpus"), cfg.airports)
    kept = filter_frequent(corpus, cfg.threshold)
    report = {
        "routes": len(corpus),
        "observations": int(np.count_nonzero(~np.isnan(corpus.passengers))),
        "airports": len(corpus.airports),
        "unresolved_routes": int(corpus.unresolved.sum()) if corpus.airports else len(corpus),
        "threshold": cfg.threshold,
        "routes_kept": len(kept),
        "passenger_share_2018": passenger_share(corpus, kept, 2018),
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_forecast(cfg: RunConfig) -> int:
    corpus = load_corpus(cfg)
    forecasts = baseline_forecasts(cfg, corpus)
    out = Path(cfg.output_dir)
    forecasts.to_csv(out / "forecast" / "forecast.csv")
    summary = forecast_summary(forecasts)
    _write_json(summary, out / "forecast" / "summary.json")
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_scenario(cfg: RunConfig) -> int:
    corpus = load_corpus(cfg)
    baseline = baseline_forecasts(cfg, corpus)
    out = Path(cfg.output_dir)
    baseline.to_csv(out / "forecast" / "forecast.csv")
    _write_json(forecast_summary(baseline), out / "forecast" / "summary.json")
    scenarios = scenario_forecasts(cfg, baseline)
    for name, adjusted in scenarios.items():
        adjusted.to_csv(out / "scenarios" / _slug(name) / "forecast.csv")
    tables = impact_tables(cfg, baseline, scenarios, corpus.airports)
    _write_impact(out, tables)
    for group in tables.values():
        print(format_loss_tables(group))
    return 0


def cmd_impact(cfg: RunConfig) -> int:
    """Loss tables from forecasts already written by ``forecast``/``scenario``."""
    out = Path(cfg.output_dir)
    baseline = read_forecast_csv(out / "forecast" / "forecast.csv")
    scenarios = {}
    for name in cfg.scenarios:
        path = out / "scenarios" / _slug(name) / "forecast.csv"
        if not path.exists():
            raise InputError(f"{path}: no forecast for scenario {name!r}; run the scenario command first")
        scenarios[name] = read_forecast_csv(path)
    airports = parse_airports(cfg.airports) if cfg.airports is not None else {}
    tables = impact_tables(cfg, baseline, scenarios, airports)
    _write_impact(out, tables)
    for group in tables.values():
        print(format_loss_tables(group))
    return 0


def cmd_tracking(cfg: RunConfig) -> int:
    events = tracking.parse_departures(_need(cfg, "departures"))
    try:
        win_a = tracking.DateWindow.parse(cfg.window_a)
        win_b = tracking.DateWindow.parse(cfg.window_b)
        trend = tracking.DateWindow.parse(cfg.trend_window)
        airline_window = tracking.DateWindow.parse(cfg.airline_window)
    except ValueError as exc:
        raise ConfigError(f"bad tracking window: {exc}") from None
    out = Path(cfg.output_dir) / "tracking"
    group = cfg.group_by
    ratios = tracking.window_ratio(events, group, win_a, win_b)
    tracking.write_ratios(ratios, out / f"ratios_{group}.csv", key_header=group)
    series = tracking.daily_counts(events, group, trend)
    tracking.write_series(series, out / f"series_{group}.csv", key_header=group)
    tracking.write_pair_matrix(tracking.pair_ratio_matrix(events, win_a, win_b), out / "pair_matrix.csv")
    airlines = tracking.daily_counts(events, "airline", airline_window)
    tracking.write_series(airlines, out / "airline_trends.csv", key_header="airline")
    summary = {
        "global": tracking.window_ratio(events, "global", win_a, win_b),
        "EU27": tracking.window_ratio(events, "global", win_a, win_b, countries=parse_region("eu27").countries),
    }
    tracking.write_ratios(
        {name: r[tracking.GLOBAL_KEY] for name, r in summary.items() if tracking.GLOBAL_KEY in r},
        out / "aggregate_ratios.csv",
        key_header="aggregate",
    )
    print(f"{len(events)} departures, {len(ratios)} {group} groups, {len(airlines)} airlines")
    return 0


def cmd_synth(cfg: RunConfig) -> int:
    profile = load_synthetic_profile(cfg.synth_profile) if cfg.synth_profile else None
    corpus = generate_synthetic_corpus(cfg.seed, cfg.synth_routes, profile)
    out = Path(cfg.output_dir) / "synth"
    write_route_corpus(corpus, out / "routes.csv", out / "airports.csv")
    print(f"wrote {len(corpus)} routes to {out}")
    return 0


COMMANDS = {
    "ingest-check": cmd_ingest_check,
    "forecast": cmd_forecast,
    "scenario": cmd_scenario,
    "impact": cmd_impact,
    "tracking": cmd_tracking,
    "synth": cmd_synth,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="airban", description="Air-traffic baseline, ban scenarios and impact.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        p = sub.add_parser(name, help=(func.__doc__ or "").strip().splitlines()[0] if func.__doc__ else None)
        p.add_argument("--config", type=Path, help="key=value run configuration file")
        p.add_argument("--threshold", type=int, help="minimum maxP for a route to be kept (default 50)")
        p.add_argument("--scenarios", help="comma-separated scenario names (built-in, custom curve, Observed)")
        p.add_argument("--region", help="comma-separated regions: global, eu27, origin_in:IT, ...")
        p.add_argument("--profile", help="comma-separated economy profiles (world, eu27 or a file)")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--corpus", type=Path)
        p.add_argument("--airports", type=Path)
        p.add_argument("--snapshots", type=Path)
        p.add_argument("--departures", type=Path)
        p.add_argument("--n-jobs", type=int)
        p.add_argument("--group-by", choices=["airport", "country", "airline"])
        p.add_argument("--routes", type=int, help="number of synthetic routes")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {
        "threshold": args.threshold, "seed": args.seed, "output_dir": args.out, "corpus": args.corpus,
        "airports": args.airports, "snapshots": args.snapshots, "departures": args.departures,
        "n_jobs": args.n_jobs, "group_by": args.group_by, "synth_routes": args.routes,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.scenarios is not None:
        cfg.scenarios = split_list(args.scenarios)
    if args.region is not None:
        cfg.regions = split_list(args.region)
    if args.profile is not None:
        cfg.profiles = split_list(args.profile)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except InputError as exc:
        print(f"airban: input error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"airban: validation error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"airban: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
