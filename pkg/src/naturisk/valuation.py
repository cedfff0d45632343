"""Firm losses: stock-market appraisal, nature-adjusted DCF, and their summaries."""

from __future__ import annotations

import math
import statistics
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from naturisk.config import ScenarioConfig
from naturisk.errors import DomainError, EmptyInput, InvalidRates
from naturisk.sectors import SECTOR_ORDER

LOSS_FLOOR = -1.0
PERCENTILES = (1, 5, 25, 50, 75, 95, 99)


@dataclass(frozen=True)
class Multipliers:
    sigma: float
    leverage: float
    degenerate: bool = False


def sector_multipliers(volatility: Mapping[str, float], leverage: Mapping[str, float]) -> dict[str, Multipliers]:
    """Volatility and leverage relative to the equal-weighted group means.

    A group with fewer than two firms, or whose mean is zero, gets unit
    multipliers flagged as degenerate.
    """
    firms = sorted(volatility)
    if not firms:
        raise EmptyInput("empty sector group")
    if len(firms) < 2:
        return {f: Multipliers(1.0, 1.0, True) for f in firms}
    # correctly rounded means, so an all-equal group gives multipliers of exactly 1
    sigma_bar = statistics.mean(volatility[f] for f in firms)
    lev_bar = statistics.mean(leverage[f] for f in firms)
    out = {}
    for f in firms:
        sig = volatility[f] / sigma_bar if sigma_bar > 0 else 1.0
        lev = leverage[f] / lev_bar if lev_bar > 0 else 1.0
        out[f] = Multipliers(sig, lev, sigma_bar <= 0 or lev_bar <= 0)
    return out


def stock_market_loss(nrs_T: float, sigma_mult: float, lev_mult: float) -> float:
    """``max(-1, -NRS * sigma_m * l_m)``."""
    if not 0.0 <= nrs_T <= 1.0:
        raise DomainError(f"NRS must lie in [0, 1], got {nrs_T}")
    if sigma_mult < 0 or lev_mult < 0:
        raise DomainError("multipliers must be non-negative")
    return max(LOSS_FLOOR, -nrs_T * sigma_mult * lev_mult)


def dcf_value(nrs: Sequence[float], cfg: ScenarioConfig | None = None) -> float:
    """Risk-adjusted DCF value.

    ``nrs[t - 1]`` is the NRS of period ``t = 1 .. T_n``. Periods ``1 .. T_n - 1``
    are discounted explicitly; period ``T_n`` carries a growing perpetuity.
    Cash flows are ``cf_base * (1 + g) ** t``.
    """
    cfg = cfg or ScenarioConfig()
    wacc, g = cfg.wacc, cfg.growth_g
    if wacc <= g:
        raise InvalidRates(f"wacc ({wacc}) must exceed g ({g})")
    nrs = np.asarray(nrs, dtype=float)
    n = len(nrs)
    if n < 1:
        raise EmptyInput("DCF needs at least one period")
    value = 0.0
    for t in range(1, n):
        cf = cfg.cf_base * (1.0 + g) ** t
        value += cf * (1.0 - nrs[t - 1]) / (1.0 + wacc) ** t
    cf_end = cfg.cf_base * (1.0 + g) ** n
    value += cf_end * (1.0 + g) * (1.0 - nrs[n - 1]) / ((wacc - g) * (1.0 + wacc) ** n)
    return float(value)


def baseline_value(cfg: ScenarioConfig | None = None) -> float:
    """DCF value without nature risk."""
    cfg = cfg or ScenarioConfig()
    return dcf_value(np.zeros(cfg.n_periods), cfg)


# Baseline under the default scenario (28 periods, 7.26% / 2.59%, CF scale 5).
BASELINE_V0 = 108.4017521597442


def dcf_loss(v_dcf: float, v0: float, lev_mult: float) -> float:
    """Leverage-scaled relative value change, floored at -1."""
    if v0 <= 0:
        raise DomainError(f"baseline value must be positive, got {v0}")
    if lev_mult < 0:
        raise DomainError("leverage multiplier must be non-negative")
    return max(LOSS_FLOOR, (v_dcf - v0) / v0 * lev_mult)


def combined_loss(loss_sm: float, loss_dcf: float) -> float:
    for name, v in (("stock-market loss", loss_sm), ("DCF loss", loss_dcf)):
        if not LOSS_FLOOR <= v <= 0.0:
            raise DomainError(f"{name} must lie in [-1, 0], got {v}")
    return (loss_sm + loss_dcf) / 2.0


@dataclass(frozen=True)
class LossResult:
    firm_id: str
    sector_group: str
    nrs: float
    sigma_mult: float
    lev_mult: float
    loss_sm: float
    loss_dcf: float
    loss_combined: float
    v_dcf: float
    v0: float


@dataclass(frozen=True)
class DistributionStats:
    n: int
    mean: float
    percentiles: dict[int, float]
    min: float
    max: float


def distribution_stats(losses: Sequence[float]) -> DistributionStats:
    """Equal-weighted mean, linear-interpolation percentiles, min and max."""
    arr = np.asarray(list(losses), dtype=float)
    if arr.size == 0:
        raise EmptyInput("no losses")
    pct = np.percentile(arr, PERCENTILES, method="linear")
    return DistributionStats(
        n=int(arr.size),
        mean=math.fsum(arr.tolist()) / arr.size,
        percentiles={p: float(v) for p, v in zip(PERCENTILES, pct)},
        min=float(arr.min()),
        max=float(arr.max()),
    )


@dataclass(frozen=True)
class SectorStat:
    sector_group: str
    n_firms: int
    mean_loss: float
    mean_nrs: float


def sector_stats(results: Sequence[LossResult]) -> list[SectorStat]:
    """Mean combined loss per industry group, in industry-table order."""
    grouped: dict[str, list[LossResult]] = defaultdict(list)
    for r in results:
        grouped[r.sector_group].append(r)
    out = []
    for code in sorted(grouped, key=lambda c: SECTOR_ORDER.get(c, len(SECTOR_ORDER))):
        members = sorted(grouped[code], key=lambda r: r.firm_id)
        out.append(
            SectorStat(
                code,
                len(members),
                math.fsum(r.loss_combined for r in members) / len(members),
                math.fsum(r.nrs for r in members) / len(members),
            )
        )
    return out
