"""Hazard projection from observed indicator series to the scenario horizon.

Two path forms come out of here:

* intensity paths (biodiversity, land degradation, natural capital): a yearly
  loss rate that the degradation module accumulates exponentially;
* pressure-level paths (global warming, population): a 0-1 pressure read
  directly, obtained by interpolating linearly from the base-year value
  towards a ruin threshold at the horizon.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from naturisk.config import ScenarioConfig
from naturisk.errors import InsufficientData, SingularFit, ThresholdDegenerate

METHODS = ("poly3", "linear", "threshold_map")
DEFAULT_METHOD = {
    "biodiversity": "poly3",
    "land_degradation": "linear",
    "natural_capital": "linear",
    "global_warming": "threshold_map",
    "population": "threshold_map",
}
THRESHOLD_KINDS = ("global_warming", "population")

# NCI scores are published on a 0-100 scale
NCI_SCALE = 100.0
LAND_SCALE = 100.0
MAX_ABS_INTENSITY = 1.0


@dataclass(frozen=True, eq=False)
class PolyFit:
    """Least-squares polynomial in the scaled variable ``u = (x - center) / scale``."""

    scaled_coef: tuple[float, ...]
    center: float
    scale: float

    @property
    def degree(self) -> int:
        return len(self.scaled_coef) - 1

    @property
    def _poly(self) -> Polynomial:
        return Polynomial(
            self.scaled_coef,
            domain=[self.center - self.scale, self.center + self.scale],
            window=[-1.0, 1.0],
        )

    def __call__(self, x):
        return self._poly(np.asarray(x, dtype=float))

    @property
    def coef(self) -> np.ndarray:
        """Coefficients in raw ``x``, ascending powers."""
        out = np.zeros(self.degree + 1)
        raw = self._poly.convert().coef
        out[: len(raw)] = raw
        return out

    @property
    def slope(self) -> float:
        if self.degree != 1:
            raise AttributeError("slope is only defined for linear fits")
        return self.scaled_coef[1] / self.scale

    @property
    def intercept(self) -> float:
        return float(self.coef[0])


def _least_squares(points: Sequence[tuple[float, float]], degree: int) -> PolyFit:
    if len(points) < degree + 1:
        raise InsufficientData(f"degree-{degree} fit needs {degree + 1} points, got {len(points)}")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    center = float(x.mean())
    scale = float(np.max(np.abs(x - center)))
    if scale == 0.0:
        raise SingularFit("all x values are identical")
    design = np.vander((x - center) / scale, degree + 1, increasing=True)
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < degree + 1:
        raise SingularFit(f"design matrix has rank {rank} < {degree + 1}")
    return PolyFit(tuple(float(c) for c in coef), center, scale)


def fit_poly3(points: Sequence[tuple[float, float]]) -> PolyFit:
    """Cubic least-squares fit of ``(x, y)`` pairs."""
    return _least_squares(points, 3)


def fit_linear(points: Sequence[tuple[float, float]]) -> PolyFit:
    """Ordinary least-squares line; interpolates exactly two points."""
    return _least_squares(points, 1)


def yoy_changes(series: Mapping[int, float]) -> dict[int, float]:
    """Year-on-year differences for every year whose predecessor is observed."""
    out = {year: value - series[year - 1] for year, value in sorted(series.items()) if year - 1 in series}
    if not out:
        raise InsufficientData("year-on-year changes need two consecutive years")
    return out


@dataclass(frozen=True, eq=False)
class ProjectedHazardPath:
    """Yearly values for ``t0 + 1 .. horizon``.

    ``values`` holds the hazard intensity for ``poly3``/``linear`` paths and the
    0-1 pressure level for ``threshold_map`` paths.
    """

    hazard_kind: str
    region_code: str
    years: tuple[int, ...]
    values: np.ndarray
    method: str

    @property
    def form(self) -> str:
        return "pressure_level" if self.method == "threshold_map" else "intensity"

    def value_at(self, year: int) -> float:
        return float(self.values[self.years.index(year)])


def _fit(points, method: str) -> PolyFit:
    if method == "poly3":
        return fit_poly3(points)
    if method == "linear":
        return fit_linear(points)
    raise ValueError(f"not an intensity method: {method!r}")


def project_intensity(
    series: Mapping[int, float],
    kind: str,
    cfg: ScenarioConfig,
    method: str | None = None,
    region_code: str = "",
) -> ProjectedHazardPath:
    """Project a hazard's yearly intensity over the scenario years.

    Biodiversity and natural capital are fitted on their YoY changes (natural
    capital rescaled to 0-1) and the intensity is the projected decline. Land
    degradation is fitted on the degraded share of land and the intensity is
    the projected yearly increment of that share. Negative intensities
    (recovery) are kept; magnitudes are clamped to 1.
    """
    method = method or DEFAULT_METHOD[kind]
    years = np.array(cfg.years, dtype=float)
    if kind in ("biodiversity", "natural_capital"):
        scale = NCI_SCALE if kind == "natural_capital" else 1.0
        deltas = yoy_changes(series)
        fit = _fit([(t, d / scale) for t, d in deltas.items()], method)
        intensity = -fit(years)
    elif kind == "land_degradation":
        fit = _fit([(t, v / LAND_SCALE) for t, v in sorted(series.items())], method)
        if method == "linear":
            intensity = np.full(len(years), fit.slope)
        else:
            intensity = fit(years) - fit(years - 1.0)
    else:
        raise ValueError(f"{kind} is a threshold hazard; use map_threshold_pressure")
    intensity = np.clip(intensity, -MAX_ABS_INTENSITY, MAX_ABS_INTENSITY)
    return ProjectedHazardPath(kind, region_code, tuple(cfg.years), intensity, method)


def interpolate_value(series: Mapping[int, float], year: int) -> float:
    """Observed value at ``year``, linearly interpolated inside the observed span."""
    if year in series:
        return float(series[year])
    known = sorted(series)
    if not known or year < known[0] or year > known[-1]:
        raise InsufficientData(f"series does not cover year {year}")
    return float(np.interp(year, known, [series[t] for t in known]))


def threshold_value(kind: str, base_value: float, cfg: ScenarioConfig) -> float:
    if kind == "global_warming":
        return cfg.temp_threshold
    if kind == "population":
        return base_value * (1.0 + cfg.pop_growth_threshold)
    raise ValueError(f"{kind} has no ruin threshold")


def threshold_pressure(value, base_value: float, threshold: float):
    """``clamp((value - base) / (threshold - base), 0, 1)``."""
    if threshold <= base_value:
        raise ThresholdDegenerate(f"threshold {threshold} does not exceed base value {base_value}")
    return np.clip((np.asarray(value, dtype=float) - base_value) / (threshold - base_value), 0.0, 1.0)


def map_threshold_pressure(
    series: Mapping[int, float],
    kind: str,
    cfg: ScenarioConfig,
    region_code: str = "",
) -> ProjectedHazardPath:
    """Pressure path of a threshold hazard (warming or population).

    The hazard value is interpolated linearly between its base-year and
    horizon values, then placed on the 0-1 scale running from the base value
    to the ruin threshold.
    """
    v0 = interpolate_value(series, cfg.t0)
    v_end = interpolate_value(series, cfg.horizon)
    threshold = threshold_value(kind, v0, cfg)
    years = np.array(cfg.years, dtype=float)
    v_t = v0 + (v_end - v0) * (years - cfg.t0) / (cfg.horizon - cfg.t0)
    pressure = threshold_pressure(v_t, v0, threshold)
    return ProjectedHazardPath(kind, region_code, tuple(cfg.years), pressure, "threshold_map")


def project_hazard(kind: str, series: Mapping[int, float], cfg: ScenarioConfig, region_code: str = "") -> ProjectedHazardPath:
    if kind in THRESHOLD_KINDS:
        return map_threshold_pressure(series, kind, cfg, region_code)
    return project_intensity(series, kind, cfg, region_code=region_code)
