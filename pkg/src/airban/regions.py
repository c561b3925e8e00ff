"""Route selection by the countries of the endpoint airports."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ._validation import check_country_code

EU27 = frozenset(
    "AT BE BG HR CY CZ DK EE FI FR DE GR HU IE IT LV LT LU MT NL PL PT RO SK SI ES SE".split()
)
ALIASES = {"EU27": EU27}

GLOBAL, ORIGIN_IN, ORIGIN_AND_DEST_IN, DOMESTIC_OF = "global", "origin_in", "origin_and_dest_in", "domestic_of"
MODES = (GLOBAL, ORIGIN_IN, ORIGIN_AND_DEST_IN, DOMESTIC_OF)


@dataclass(frozen=True)
class RegionFilter:
    """Which routes count towards a region.

    ``origin_in`` keeps routes departing one of ``countries``;
    ``origin_and_dest_in`` needs both ends inside; ``domestic_of`` needs both
    ends in the same listed country. Routes with an endpoint missing from
    the airport table never match a non-global filter.

    ``require_all`` controls :meth:`check_countries`: when False (set for
    aliases such as EU27) it is enough that one listed country is known.
    """

    mode: str = GLOBAL
    countries: frozenset = frozenset()
    name: str = ""
    require_all: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown region mode {self.mode!r}")
        object.__setattr__(self, "countries", frozenset(self.countries))
        if (self.mode == GLOBAL) != (not self.countries):
            raise ValueError("countries must be empty exactly when mode is global")
        for c in self.countries:
            check_country_code(c)
        if not self.name:
            label = "global" if self.mode == GLOBAL else f"{self.mode}:{','.join(sorted(self.countries))}"
            object.__setattr__(self, "name", label)

    def check_countries(self, airports: Mapping) -> None:
        known = {a.country for a in airports.values()}
        unknown = sorted(self.countries - known)
        if self.require_all and unknown:
            raise ValueError(f"region {self.name}: unknown country code(s) {', '.join(unknown)}")
        if self.countries and len(unknown) == len(self.countries):
            raise ValueError(f"region {self.name}: none of its countries appear in the airport table")

    def member_mask(self, origins, destinations, airports: Mapping) -> np.ndarray:
        origins = np.asarray(origins)
        destinations = np.asarray(destinations)
        if self.mode == GLOBAL:
            return np.ones(origins.shape[0], dtype=bool)
        o_country = _countries_of(origins, airports)
        d_country = _countries_of(destinations, airports)
        inside = sorted(self.countries)
        o_in = np.isin(o_country, inside)
        if self.mode == ORIGIN_IN:
            return o_in
        d_in = np.isin(d_country, inside)
        if self.mode == ORIGIN_AND_DEST_IN:
            return o_in & d_in
        return o_in & (o_country == d_country)


def _countries_of(codes, airports):
    uniq, inv = np.unique(codes, return_inverse=True)
    lookup = np.array([airports[c].country if c in airports else "" for c in uniq.tolist()], dtype="<U2")
    return lookup[inv] if uniq.size else np.zeros(0, dtype="<U2")


def parse_region(spec: str) -> RegionFilter:
    """Parse ``global``, ``eu27`` or ``<mode>:<country>[,<country>...]``.

    Country lists may use the ``EU27`` alias. ``eu27`` alone means flights
    from EU27 to EU27.
    """
    text = spec.strip()
    if text.lower() == "global":
        return RegionFilter()
    if text.upper() in ALIASES:
        return RegionFilter(ORIGIN_AND_DEST_IN, ALIASES[text.upper()], name=text.upper(), require_all=False)
    if ":" not in text:
        raise ValueError(f"region spec {spec!r} must be 'global', 'eu27' or '<mode>:<countries>'")
    mode, _, rest = text.partition(":")
    countries: set[str] = set()
    alias_used = False
    for item in rest.split(","):
        item = item.strip().upper()
        if not item:
            continue
        if item in ALIASES:
            countries |= ALIASES[item]
            alias_used = True
        else:
            countries.add(item)
    return RegionFilter(mode.strip().lower(), frozenset(countries), name=text, require_all=not alias_used)
