"""Air-traffic baseline forecasting, travel-ban scenarios and impact estimates."""

from .errors import ConfigError, CorpusFormatError, InputError
from .forecast import BaselineForecaster, ForecastSet, fit_month_model, sample_poisson_paths
from .impact import EconomyProfile, load_profile, quarterly_loss_table, socio_impact
from .ingest import RouteCorpus, RouteKey, filter_frequent, generate_synthetic_corpus, parse_route_corpus
from .regions import RegionFilter, parse_region
from .scenario import ScenarioAdjuster, ScenarioCurve, apply_mask, apply_scenario, builtin_curve

__version__ = "0.1.0"

__all__ = [
    "BaselineForecaster",
    "ConfigError",
    "CorpusFormatError",
    "EconomyProfile",
    "ForecastSet",
    "InputError",
    "RegionFilter",
    "RouteCorpus",
    "RouteKey",
    "ScenarioAdjuster",
    "ScenarioCurve",
    "apply_mask",
    "apply_scenario",
    "builtin_curve",
    "filter_frequent",
    "fit_month_model",
    "generate_synthetic_corpus",
    "load_profile",
    "parse_region",
    "parse_route_corpus",
    "quarterly_loss_table",
    "sample_poisson_paths",
    "socio_impact",
]
