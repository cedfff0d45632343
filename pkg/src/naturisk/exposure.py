"""Geographic exposure of firms from their spatial revenue breakdown."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from naturisk.errors import EmptyAggregate, NegativeRevenue, ZeroAggregateGdp, ZeroTotalRevenue
from naturisk.ingest import REST_OF_WORLD


@dataclass(frozen=True)
class ExposureVector:
    firm_id: str
    shares: dict[str, float]

    def remap_uncovered(self, covered) -> "ExposureVector":
        """Fold shares of countries outside ``covered`` into ``REST_OF_WORLD``."""
        out: dict[str, float] = {}
        for iso3, share in sorted(self.shares.items()):
            key = iso3 if iso3 in covered else REST_OF_WORLD
            out[key] = out.get(key, 0.0) + share
        return ExposureVector(self.firm_id, out)


def disaggregate_region(aggregate_code: str, amount: float, members: Mapping[str, float]) -> dict[str, float]:
    """Split ``amount`` across member countries in proportion to GDP."""
    if not members:
        raise EmptyAggregate(aggregate_code)
    total_gdp = math.fsum(members.values())
    if total_gdp <= 0:
        raise ZeroAggregateGdp(aggregate_code)
    return {iso3: amount * gdp / total_gdp for iso3, gdp in sorted(members.items())}


def exposure_shares(
    revenues: Mapping[str, float],
    aggregates: Mapping[str, Sequence[str]] | None = None,
    gdp: Mapping[str, float] | None = None,
    firm_id: str = "",
) -> ExposureVector:
    """Per-country revenue shares, with regional aggregates split by GDP."""
    aggregates = aggregates or {}
    gdp = gdp or {}
    amounts: dict[str, float] = {}
    for code, rev in sorted(revenues.items()):
        if rev < 0:
            raise NegativeRevenue(f"{firm_id or 'firm'}: negative revenue {rev} in {code}")
        if code in aggregates:
            split = disaggregate_region(code, rev, {m: gdp[m] for m in aggregates[code]})
        else:
            split = {code: rev}
        for iso3, amount in split.items():
            amounts[iso3] = amounts.get(iso3, 0.0) + amount
    total = math.fsum(amounts.values())
    if total <= 0:
        raise ZeroTotalRevenue(firm_id or "firm has no positive revenue")
    return ExposureVector(firm_id, {iso3: amounts[iso3] / total for iso3 in sorted(amounts)})
