"""Input validation helpers used across the estimators and loaders."""

from __future__ import annotations

import re
import warnings
from numbers import Integral, Real

import numpy as np

AIRPORT_RE = re.compile(r"[A-Z]{3}")
COUNTRY_RE = re.compile(r"[A-Z]{2}")


def check_airport_code(code, what="airport code") -> str:
    if not isinstance(code, str) or not AIRPORT_RE.fullmatch(code):
        raise ValueError(f"{what} must match [A-Z]{{3}}, got {code!r}")
    return code


def check_country_code(code, what="country code") -> str:
    if not isinstance(code, str) or not COUNTRY_RE.fullmatch(code):
        raise ValueError(f"{what} must be an ISO 3166-1 alpha-2 code, got {code!r}")
    return code


def check_non_negative_int(value, name) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return int(value)


def check_positive_int(value, name) -> int:
    value = check_non_negative_int(value, name)
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return value


def check_fraction_vector(values, name, *, size, upper=1.0, warn_above=None) -> np.ndarray:
    """Validate a vector of multipliers in ``[0, upper]``.

    Values in ``(warn_above, upper]`` are accepted with a ``UserWarning``.
    """
    arr = np.asarray(values, dtype=float)
    if arr.shape != (size,):
        raise ValueError(f"{name} must have {size} values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    bad = np.flatnonzero((arr < 0) | (arr > upper))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"{name}[{i + 1}] = {arr[i]} outside [0, {upper}]")
    if warn_above is not None and np.any(arr > warn_above):
        warnings.warn(f"{name} has values above {warn_above}", UserWarning, stacklevel=3)
    return arr


def check_real(value, name, *, minimum=None, strict=False) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise TypeError(f"{name} must be a number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite")
    if minimum is not None:
        if strict and value <= minimum:
            raise ValueError(f"{name} must be > {minimum}, got {value}")
        if not strict and value < minimum:
            raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value
