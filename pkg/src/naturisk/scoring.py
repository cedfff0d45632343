"""Nature Risk Score: vulnerability times exposure-weighted degradation."""

from __future__ import annotations

from typing import Mapping, Sequence

from naturisk.errors import MissingCdi


def nature_risk_score(exposure: Mapping[str, float], cdi_at: Mapping[str, float], vs: float) -> float:
    """``vs * sum_c CDI_c * share_c``, summed in sorted country order."""
    acc = 0.0
    for iso3 in sorted(exposure):
        if iso3 not in cdi_at:
            raise MissingCdi(iso3)
        acc += cdi_at[iso3] * exposure[iso3]
    return vs * acc


def nrs_time_series(
    exposure: Mapping[str, float],
    cdi_series: Mapping[str, Sequence[float]],
    vs: float,
    years: Sequence[int],
) -> dict[int, float]:
    """Yearly NRS; ``cdi_series[iso3][i]`` is the CDI of ``years[i]``."""
    for iso3 in exposure:
        if iso3 not in cdi_series:
            raise MissingCdi(iso3)
        if len(cdi_series[iso3]) != len(years):
            raise MissingCdi(f"{iso3} (series does not cover {years[0]}..{years[-1]})")
    return {
        year: nature_risk_score(exposure, {c: float(cdi_series[c][i]) for c in exposure}, vs)
        for i, year in enumerate(years)
    }
