"""End-to-end orchestration of the engine over a :class:`Dataset`.

Each stage is computed on first access and cached. Per-country and per-firm
work runs on a thread pool; results are always gathered in sorted key order,
so the worker count never changes the output.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from typing import Callable, Iterable, TypeVar

import numpy as np

from naturisk.config import ScenarioConfig
from naturisk.degradation import DegradationSeries, cdi_series, continent_average_path, land_weighted_mean
from naturisk.errors import NoHazardData, ValidationFailed
from naturisk.exposure import ExposureVector, exposure_shares
from naturisk.ingest import (
    CONTINENTS,
    HAZARD_KINDS,
    REST_OF_WORLD,
    Dataset,
    HazardSource,
    resolve_all_sources,
    validate_dataset,
)
from naturisk.projection import ProjectedHazardPath, project_hazard
from naturisk.scoring import nrs_time_series
from naturisk.valuation import (
    LossResult,
    Multipliers,
    baseline_value,
    combined_loss,
    dcf_loss,
    dcf_value,
    sector_multipliers,
    stock_market_loss,
)
from naturisk.vulnerability import VulnerabilityScore, score_all

log = logging.getLogger(__name__)

WORLD = "WLD"
THREADS_ENV = "NATURISK_THREADS"

K = TypeVar("K")
V = TypeVar("V")


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
    return min(8, os.cpu_count() or 1)


class Pipeline:
    def __init__(self, ds: Dataset, cfg: ScenarioConfig | None = None, workers: int | None = None, validate: bool = True):
        self.ds = ds
        self.cfg = cfg or ScenarioConfig()
        self.workers = workers or worker_count()
        self._warnings: set[str] = set()
        if validate:
            report = validate_dataset(ds)
            if not report.ok:
                raise ValidationFailed(report)
            for issue in report.warnings:
                self._warn(f"{issue.table}: {issue.message}")

    @property
    def warnings(self) -> list[str]:
        return sorted(self._warnings)

    def _warn(self, message: str) -> None:
        log.warning(message)
        self._warnings.add(message)

    def _map(self, fn: Callable[[K], V], keys: Iterable[K]) -> dict[K, V]:
        keys = sorted(keys)
        if self.workers <= 1 or len(keys) < 2:
            return {k: fn(k) for k in keys}
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return dict(zip(keys, pool.map(fn, keys)))

    # -- hazards -------------------------------------------------------------

    @cached_property
    def sources(self) -> dict[tuple[str, str], HazardSource]:
        return resolve_all_sources(self.ds)

    @cached_property
    def published_paths(self) -> dict[tuple[str, str], ProjectedHazardPath]:
        """Projection of every published series some country resolves to."""
        needed = {(s.hazard_kind, s.region_code) for s in self.sources.values() if s.mode in ("direct", "coarser")}
        index = self.ds.series_index

        def project(key):
            kind, code = key
            return project_hazard(kind, index[key], self.cfg, region_code=code)

        return self._map(project, needed)

    @cached_property
    def country_paths(self) -> dict[tuple[str, str], ProjectedHazardPath]:
        """Resolved path per ``(iso3, hazard_kind)``; missing hazards are absent."""
        out = {}
        for (iso3, kind), src in sorted(self.sources.items()):
            if src.mode in ("direct", "coarser"):
                out[(iso3, kind)] = self.published_paths[(kind, src.region_code)]
        land = {c.iso3: c.land_area for c in self.ds.countries}
        for (iso3, kind), src in sorted(self.sources.items()):
            if src.mode != "continent_average":
                continue
            members = {
                other.iso3: out[(other.iso3, kind)]
                for other in self.ds.countries
                if other.continent == src.region_code and (other.iso3, kind) in out and other.iso3 != iso3
            }
            out[(iso3, kind)] = continent_average_path(members, land, src.region_code)
        return dict(sorted(out.items()))

    @cached_property
    def degradation(self) -> dict[str, DegradationSeries]:
        all_paths = self.country_paths
        sources = self.sources

        def compute(iso3):
            paths = {k: all_paths[(iso3, k)] for k in HAZARD_KINDS if (iso3, k) in all_paths}
            flags = [f"{k}:{sources[(iso3, k)].mode}" for k in HAZARD_KINDS if sources[(iso3, k)].flagged]
            try:
                return cdi_series(iso3, paths, self.cfg, flags)
            except NoHazardData:
                return None

        results = self._map(compute, [c.iso3 for c in self.ds.countries])
        for iso3, series in results.items():
            if series is None:
                self._warn(f"{iso3}: no hazard data, excluded from the CDI table")
        return {iso3: s for iso3, s in results.items() if s is not None}

    @cached_property
    def regions(self) -> dict[str, np.ndarray]:
        """Land-weighted CDI paths of each continent and of the world."""
        land = {c.iso3: c.land_area for c in self.ds.countries}
        cdi = {iso3: s.cdi for iso3, s in self.degradation.items()}
        out = {}
        for continent in CONTINENTS:
            members = [c.iso3 for c in self.ds.countries if c.continent == continent and c.iso3 in cdi]
            if members:
                out[continent] = land_weighted_mean(cdi, land, members)
        if cdi:
            out[WORLD] = land_weighted_mean(cdi, land, list(cdi))
        return out

    @cached_property
    def cdi_table(self) -> dict[str, np.ndarray]:
        """CDI path per scoring key, including the rest-of-world stand-in."""
        table = {iso3: s.cdi for iso3, s in self.degradation.items()}
        if WORLD in self.regions:
            table[REST_OF_WORLD] = self.regions[WORLD]
        return table

    # -- firms ---------------------------------------------------------------

    @cached_property
    def vulnerability(self) -> dict[str, VulnerabilityScore]:
        codes = {f.nace4 for f in self.ds.firms}
        return score_all(codes, self.ds.crosswalk, self.ds.dependencies)

    @cached_property
    def exposures(self) -> dict[str, ExposureVector]:
        gdp = {c.iso3: c.gdp for c in self.ds.countries}
        covered = set(self.cdi_table)
        out = {}
        for firm in self.ds.firms:
            raw = exposure_shares(self.ds.revenues_by_firm[firm.firm_id], self.ds.aggregate_map, gdp, firm.firm_id)
            vec = raw.remap_uncovered(covered)
            if REST_OF_WORLD in vec.shares and REST_OF_WORLD not in raw.shares:
                self._warn(f"{firm.firm_id}: exposure to countries without CDI mapped to {REST_OF_WORLD}")
            out[firm.firm_id] = vec
        return out

    @cached_property
    def nrs(self) -> dict[str, dict[int, float]]:
        years = list(self.cfg.years)
        cdi = self.cdi_table
        exposures = self.exposures
        vulnerability = self.vulnerability
        firms = self.ds.firm_map

        def score(firm_id):
            firm = firms[firm_id]
            return nrs_time_series(exposures[firm_id].shares, cdi, vulnerability[firm.nace4].score, years)

        return self._map(score, [f.firm_id for f in self.ds.firms])

    @cached_property
    def multipliers(self) -> dict[str, Multipliers]:
        groups: dict[str, list] = {}
        for firm in self.ds.firms:
            groups.setdefault(firm.sector_group, []).append(firm)
        out = {}
        for code, members in sorted(groups.items()):
            mults = sector_multipliers({f.firm_id: f.volatility for f in members}, {f.firm_id: f.leverage for f in members})
            if any(m.degenerate for m in mults.values()):
                self._warn(f"sector {code}: degenerate group ({len(members)} firm(s)), unit multipliers used")
            out.update(mults)
        return dict(sorted(out.items()))

    @cached_property
    def v0(self) -> float:
        return baseline_value(self.cfg)

    @cached_property
    def losses(self) -> dict[str, LossResult]:
        nrs = self.nrs
        mults = self.multipliers
        horizon = self.cfg.horizon
        v0 = self.v0
        firms = self.ds.firm_map

        def value(firm_id):
            firm = firms[firm_id]
            series = nrs[firm_id]
            m = mults[firm_id]
            nrs_T = series[horizon]
            loss_sm = stock_market_loss(nrs_T, m.sigma, m.leverage)
            v_dcf = dcf_value([series[y] for y in self.cfg.years], self.cfg)
            loss_dcf = dcf_loss(v_dcf, v0, m.leverage)
            return LossResult(
                firm_id,
                firm.sector_group,
                nrs_T,
                m.sigma,
                m.leverage,
                loss_sm,
                loss_dcf,
                combined_loss(loss_sm, loss_dcf),
                v_dcf,
                v0,
            )

        return self._map(value, [f.firm_id for f in self.ds.firms])
