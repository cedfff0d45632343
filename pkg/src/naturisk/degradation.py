"""Country Degradation Index: pressures, nonlinear damages and tipping points."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from naturisk.config import ScenarioConfig
from naturisk.errors import DomainError, EmptyInput, EmptyRegion, NoHazardData, YearOutOfRange
from naturisk.ingest import HAZARD_KINDS
from naturisk.projection import ProjectedHazardPath

DEFAULT_STEEPNESS = 10.0
DEFAULT_MIDPOINT = 0.5
DEFAULT_PI = 0.289


def cumulative_pressure(path: ProjectedHazardPath, upto_year: int) -> float:
    """Environmental pressure accumulated from ``t0 + 1`` through ``upto_year``.

    Intensity paths give ``1 - exp(-sum(lambda))``; negative sums (recovery)
    are passed through. Pressure-level paths are read directly.
    """
    if upto_year not in path.years:
        raise YearOutOfRange(f"{upto_year} outside {path.years[0]}..{path.years[-1]}")
    idx = path.years.index(upto_year)
    if path.form == "pressure_level":
        return float(path.values[idx])
    total = 0.0
    for lam in path.values[: idx + 1]:
        total += float(lam)
    return 1.0 - math.exp(-total)


def pressure_path(path: ProjectedHazardPath) -> np.ndarray:
    """:func:`cumulative_pressure` for every year of the path."""
    if path.form == "pressure_level":
        return np.asarray(path.values, dtype=float).copy()
    out = np.empty(len(path.years))
    total = 0.0
    for i, lam in enumerate(path.values):
        total += float(lam)
        out[i] = 1.0 - math.exp(-total)
    return out


def _logistic(x, steepness, midpoint):
    # exp overflows to inf for strongly negative x, giving the correct limit 0
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-steepness * (x - midpoint)))


def damage(ep, steepness: float = DEFAULT_STEEPNESS, midpoint: float = DEFAULT_MIDPOINT):
    """Linear-plus-logistic damage of a pressure: ``EP + (1 - EP) * logistic(EP)``."""
    ep_arr = np.asarray(ep, dtype=float)
    out = ep_arr + (1.0 - ep_arr) * _logistic(ep_arr, steepness, midpoint)
    return float(out) if out.ndim == 0 else out


def mean_damage(damages: Sequence[float]) -> float:
    """Mean of per-hazard damages, clamped to [0, 1]."""
    values = [float(d) for d in damages]
    if not values:
        raise EmptyInput("mean damage of no hazards")
    return min(1.0, max(0.0, math.fsum(values) / len(values)))


def _check_unit(name: str, value) -> None:
    arr = np.asarray(value, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def tipping_probability(mean_dmg, steepness: float = DEFAULT_STEEPNESS, midpoint: float = DEFAULT_MIDPOINT):
    """Probability of crossing a tipping point given the mean damage."""
    _check_unit("mean damage", mean_dmg)
    d = np.asarray(mean_dmg, dtype=float)
    out = (1.0 - d) * _logistic(d, steepness, midpoint)
    return float(out) if out.ndim == 0 else out


def tipping_damage(mean_dmg, pi_tipping: float = DEFAULT_PI):
    """Share of still-undamaged nature impaired by a crossed tipping point."""
    _check_unit("mean damage", mean_dmg)
    _check_unit("pi", pi_tipping)
    out = (1.0 - np.asarray(mean_dmg, dtype=float)) * pi_tipping
    return float(out) if out.ndim == 0 else out


def country_degradation_index(mean_dmg, p, d_tp):
    _check_unit("mean damage", mean_dmg)
    _check_unit("tipping probability", p)
    _check_unit("tipping damage", d_tp)
    out = np.minimum(1.0, np.asarray(mean_dmg, dtype=float) + np.asarray(p, dtype=float) * np.asarray(d_tp, dtype=float))
    return float(out) if out.ndim == 0 else out


def cdi_from_mean_damage(mean_dmg, cfg: ScenarioConfig | None = None):
    """Chain tipping probability, tipping damage and CDI for a mean damage."""
    cfg = cfg or ScenarioConfig()
    p = tipping_probability(mean_dmg, cfg.damage_steepness, cfg.damage_midpoint)
    d_tp = tipping_damage(mean_dmg, cfg.pi_tipping)
    return country_degradation_index(mean_dmg, p, d_tp)


@dataclass(frozen=True, eq=False)
class DegradationSeries:
    country: str
    years: tuple[int, ...]
    mean_damage: np.ndarray
    tipping_prob: np.ndarray
    tipping_damage: np.ndarray
    cdi: np.ndarray
    hazard_pressure: dict[str, np.ndarray] = field(default_factory=dict)
    hazard_damage: dict[str, np.ndarray] = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    def cdi_at(self, year: int) -> float:
        return float(self.cdi[self.years.index(year)])


def cdi_series(
    country: str,
    paths: Mapping[str, ProjectedHazardPath],
    cfg: ScenarioConfig,
    flags: Sequence[str] = (),
) -> DegradationSeries:
    """Yearly degradation of one country from its resolved hazard paths.

    The mean damage is taken over the hazards present in ``paths``, so a
    wholly missing hazard reduces ``n`` rather than counting as zero.
    """
    kinds = [k for k in HAZARD_KINDS if k in paths]
    if not kinds:
        raise NoHazardData(f"{country}: no resolvable hazard series")
    years = tuple(cfg.years)
    pressures, damages = {}, {}
    for kind in kinds:
        if tuple(paths[kind].years) != years:
            raise YearOutOfRange(f"{country}/{kind}: path years do not match the scenario")
        pressures[kind] = pressure_path(paths[kind])
        damages[kind] = damage(pressures[kind], cfg.damage_steepness, cfg.damage_midpoint)

    n = len(years)
    dbar, p, d_tp, cdi = (np.empty(n) for _ in range(4))
    for i in range(n):
        dbar[i] = mean_damage([damages[k][i] for k in kinds])
        p[i] = tipping_probability(dbar[i], cfg.damage_steepness, cfg.damage_midpoint)
        d_tp[i] = tipping_damage(dbar[i], cfg.pi_tipping)
        cdi[i] = country_degradation_index(dbar[i], p[i], d_tp[i])
    return DegradationSeries(country, years, dbar, p, d_tp, cdi, pressures, damages, tuple(flags))


def land_weighted_mean(values: Mapping[str, np.ndarray | float], land_areas: Mapping[str, float], members: Sequence[str]):
    """``sum(land_c * x_c) / sum(land_c)`` over ``members`` in sorted order."""
    members = sorted(set(members))
    if not members:
        raise EmptyRegion("region has no members")
    total_land = math.fsum(land_areas[m] for m in members)
    if total_land <= 0:
        raise EmptyRegion("region has no land area")
    if len(members) == 1:
        # exact identity rather than land * x / land
        return np.array(values[members[0]], dtype=float)
    acc = 0.0
    for m in members:
        acc = acc + land_areas[m] * np.asarray(values[m], dtype=float)
    return acc / total_land


def region_aggregate(
    series_by_country: Mapping[str, DegradationSeries | np.ndarray],
    land_areas: Mapping[str, float],
    members: Sequence[str],
) -> np.ndarray:
    """Land-weighted CDI path of a group of countries."""
    values = {
        c: (s.cdi if isinstance(s, DegradationSeries) else np.asarray(s, dtype=float))
        for c, s in series_by_country.items()
        if c in set(members)
    }
    missing = set(members) - set(values)
    if missing:
        raise EmptyRegion(f"no series for members {sorted(missing)}")
    return land_weighted_mean(values, land_areas, members)


def continent_average_path(
    member_paths: Mapping[str, ProjectedHazardPath],
    land_areas: Mapping[str, float],
    continent: str,
) -> ProjectedHazardPath:
    """Land-weighted mean path standing in for a country with no series."""
    if not member_paths:
        raise EmptyRegion(f"{continent}: no member paths to average")
    first = member_paths[min(member_paths)]
    values = land_weighted_mean({c: p.values for c, p in member_paths.items()}, land_areas, list(member_paths))
    return ProjectedHazardPath(first.hazard_kind, continent, first.years, np.asarray(values), first.method)
