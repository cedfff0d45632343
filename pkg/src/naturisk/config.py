"""Scenario configuration and its plain-text ``key = value`` file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from naturisk.errors import ConfigError


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of the business-as-usual nature-decline scenario.

    Attributes:
        t0: Base year; pressures accumulate from ``t0 + 1``.
        horizon: Scenario horizon year ``T``.
        temp_threshold: Warming (degC above pre-industrial) mapped to full pressure.
        pop_growth_threshold: Population growth over the base value mapped to full pressure.
        damage_steepness: Slope of the logistic damage and tipping terms.
        damage_midpoint: Centre of the logistic damage and tipping terms.
        pi_tipping: Share of undamaged nature impaired when a tipping point is crossed.
        wacc: Discount rate of the DCF valuation.
        growth_g: Cash-flow growth rate of the DCF valuation.
        cf_base: Cash flow scale, ``CF_t = cf_base * (1 + g) ** t``.
    """

    t0: int = 2022
    horizon: int = 2050
    temp_threshold: float = 3.0
    pop_growth_threshold: float = 0.50
    damage_steepness: float = 10.0
    damage_midpoint: float = 0.5
    pi_tipping: float = 0.289
    wacc: float = 0.0726
    growth_g: float = 0.0259
    cf_base: float = 5.0

    def __post_init__(self):
        if self.t0 >= self.horizon:
            raise ConfigError(f"t0 ({self.t0}) must precede horizon ({self.horizon})")
        if self.wacc <= self.growth_g:
            raise ConfigError(f"wacc ({self.wacc}) must exceed growth_g ({self.growth_g})")
        if not -1.0 < self.wacc < 1.0 or not -1.0 < self.growth_g < 1.0:
            raise ConfigError("wacc and growth_g must lie in (-1, 1)")
        if not 0.0 <= self.pi_tipping <= 1.0:
            raise ConfigError("pi_tipping must lie in [0, 1]")
        if self.temp_threshold <= 0.0:
            raise ConfigError("temp_threshold must be positive")
        if self.pop_growth_threshold <= 0.0:
            raise ConfigError("pop_growth_threshold must be positive")
        if self.damage_steepness <= 0.0:
            raise ConfigError("damage_steepness must be positive")
        if not 0.0 <= self.damage_midpoint <= 1.0:
            raise ConfigError("damage_midpoint must lie in [0, 1]")
        if self.cf_base <= 0.0:
            raise ConfigError("cf_base must be positive")

    @property
    def years(self) -> range:
        """Projection years ``t0 + 1 .. horizon``."""
        return range(self.t0 + 1, self.horizon + 1)

    @property
    def n_periods(self) -> int:
        return self.horizon - self.t0

    def to_text(self) -> str:
        return "".join(f"{f.name} = {getattr(self, f.name)!r}\n" for f in dataclasses.fields(self))

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELD_TYPES = {f.name: (int if f.type in ("int", int) else float) for f in dataclasses.fields(ScenarioConfig)}


def parse_config(text: str) -> ScenarioConfig:
    values: dict[str, int | float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: key {key!r} has no value")
        try:
            values[key] = _FIELD_TYPES[key](value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from None
    return ScenarioConfig(**values)


def load_config(path: str | Path | None) -> ScenarioConfig:
    """Read a config file; ``None`` gives the defaults."""
    if path is None:
        return ScenarioConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return parse_config(text)
