"""Loading, validation and serialization of the input tables.

A dataset directory holds six CSV files plus an optional
``region_aggregates.csv``::

    countries.csv              iso3,name,m49_subregion,continent,iucn_region,land_area_km2,gdp_usd
    hazards.csv                hazard_kind,region_scope,region_code,year,value
    firms.csv                  firm_id,name,nace4,volatility_ann,leverage_debt_to_assets
    revenues.csv               firm_id,region_code,revenue
    encore_dependencies.csv    production_process,ecosystem_service,materiality_rating
    nace_crosswalk.csv         nace4,production_process
    region_aggregates.csv      aggregate_code,iso3

Structural problems (bad types, duplicates, unresolved keys) raise while
loading. Value-range problems are collected by :func:`validate_dataset`, which
never raises.
"""

from __future__ import annotations

import csv
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator

from naturisk.errors import DanglingReference, MissingFile, SchemaViolation

HAZARD_KINDS = ("biodiversity", "land_degradation", "global_warming", "population", "natural_capital")
REGION_SCOPES = ("country", "subregion", "continent", "global")
CONTINENTS = ("AFR", "ASI", "EUR", "NAM", "OCE", "SAM")
RATINGS = ("none", "very_low", "low", "medium", "high", "very_high")

# Granularity at which each hazard is normally published.
NATIVE_SCOPE = {
    "biodiversity": "subregion",
    "land_degradation": "country",
    "global_warming": "continent",
    "population": "global",
    "natural_capital": "country",
}

REST_OF_WORLD = "REST_OF_WORLD"
YEAR_RANGE = (1950, 2100)
MAX_LEVERAGE = 5.0

NACE_PATTERN = re.compile(r"^\d{2}\.\d{2}$")
ISO3_PATTERN = re.compile(r"^[A-Z]{3}$")

FILES = {
    "countries": ("countries.csv", ("iso3", "name", "m49_subregion", "continent", "iucn_region", "land_area_km2", "gdp_usd")),
    "hazards": ("hazards.csv", ("hazard_kind", "region_scope", "region_code", "year", "value")),
    "firms": ("firms.csv", ("firm_id", "name", "nace4", "volatility_ann", "leverage_debt_to_assets")),
    "revenues": ("revenues.csv", ("firm_id", "region_code", "revenue")),
    "dependencies": ("encore_dependencies.csv", ("production_process", "ecosystem_service", "materiality_rating")),
    "crosswalk": ("nace_crosswalk.csv", ("nace4", "production_process")),
}
AGGREGATES_FILE = ("region_aggregates.csv", ("aggregate_code", "iso3"))

_RATING_ALIASES = {"no_dependency": "none", "no": "none", "zero": "none", "vl": "very_low", "vh": "very_high"}


@dataclass(frozen=True)
class CountryMeta:
    iso3: str
    name: str
    m49_subregion: str
    continent: str
    iucn_region: str
    land_area: float
    gdp: float


@dataclass(frozen=True)
class HazardObservation:
    hazard_kind: str
    region_scope: str
    region_code: str
    year: int
    value: float


@dataclass(frozen=True)
class FirmRecord:
    firm_id: str
    name: str
    nace4: str
    volatility: float
    leverage: float

    @property
    def sector_group(self) -> str:
        from naturisk.sectors import sector_group

        return sector_group(self.nace4)


@dataclass(frozen=True)
class RevenueRow:
    firm_id: str
    region_code: str
    revenue: float


@dataclass(frozen=True)
class DependencyRow:
    production_process: str
    ecosystem_service: str
    rating: str


@dataclass(frozen=True)
class CrosswalkRow:
    nace4: str
    production_process: str


@dataclass(frozen=True)
class Dataset:
    """All input tables, sorted by key. Immutable once built."""

    countries: tuple[CountryMeta, ...]
    hazards: tuple[HazardObservation, ...]
    firms: tuple[FirmRecord, ...]
    revenues: tuple[RevenueRow, ...]
    dependencies: tuple[DependencyRow, ...]
    crosswalk: tuple[CrosswalkRow, ...]
    aggregates: tuple[tuple[str, tuple[str, ...]], ...] = ()

    @cached_property
    def country_map(self) -> dict[str, CountryMeta]:
        return {c.iso3: c for c in self.countries}

    @cached_property
    def firm_map(self) -> dict[str, FirmRecord]:
        return {f.firm_id: f for f in self.firms}

    @cached_property
    def aggregate_map(self) -> dict[str, tuple[str, ...]]:
        return dict(self.aggregates)

    @cached_property
    def revenues_by_firm(self) -> dict[str, dict[str, float]]:
        out: dict[str, dict[str, float]] = defaultdict(dict)
        for row in self.revenues:
            out[row.firm_id][row.region_code] = row.revenue
        return dict(out)

    @cached_property
    def series_index(self) -> dict[tuple[str, str], dict[int, float]]:
        """``(hazard_kind, region_code) -> {year: value}`` in year order."""
        out: dict[tuple[str, str], dict[int, float]] = defaultdict(dict)
        for obs in self.hazards:
            out[(obs.hazard_kind, obs.region_code)][obs.year] = obs.value
        return dict(out)

    @cached_property
    def series_scope(self) -> dict[tuple[str, str], str]:
        return {(o.hazard_kind, o.region_code): o.region_scope for o in self.hazards}

    def series(self, kind: str, region_code: str) -> dict[int, float]:
        return self.series_index[(kind, region_code)]


# -- loading -----------------------------------------------------------------


def _read_rows(path: Path, table: str, columns: tuple[str, ...]) -> Iterator[tuple[int, dict[str, str]]]:
    if not path.is_file():
        raise MissingFile(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in columns:
            if col not in header:
                raise SchemaViolation(table, 0, col, "missing column in header")
        for lineno, row in enumerate(reader, start=2):
            clean = {}
            for col in columns:
                value = (row.get(col) or "").strip()
                if not value:
                    raise SchemaViolation(table, lineno, col, "empty value")
                clean[col] = value
            yield lineno, clean


def _float(table: str, row: int, col: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise SchemaViolation(table, row, col, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise SchemaViolation(table, row, col, f"not finite: {text!r}")
    return value


def _int(table: str, row: int, col: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise SchemaViolation(table, row, col, f"not an integer: {text!r}") from None


def normalize_rating(text: str) -> str | None:
    """Map a rating token to the canonical enumeration, ignoring case."""
    token = re.sub(r"[\s\-]+", "_", text.strip().lower())
    token = _RATING_ALIASES.get(token, token)
    return token if token in RATINGS else None


def _unique(table: str, seen: dict, key, lineno: int, col: str):
    if key in seen:
        raise SchemaViolation(table, lineno, col, f"duplicate key {key!r} (first at row {seen[key]})")
    seen[key] = lineno


def _load_countries(path: Path) -> list[CountryMeta]:
    table = "countries"
    out, seen = [], {}
    for n, r in _read_rows(path, table, FILES[table][1]):
        iso3 = r["iso3"].upper()
        if not ISO3_PATTERN.match(iso3):
            raise SchemaViolation(table, n, "iso3", f"not a 3-letter code: {r['iso3']!r}")
        _unique(table, seen, iso3, n, "iso3")
        continent = r["continent"].upper()
        if continent not in CONTINENTS:
            raise SchemaViolation(table, n, "continent", f"unknown continent {r['continent']!r}")
        land = _float(table, n, "land_area_km2", r["land_area_km2"])
        if land <= 0:
            raise SchemaViolation(table, n, "land_area_km2", "must be positive")
        gdp = _float(table, n, "gdp_usd", r["gdp_usd"])
        if gdp < 0:
            raise SchemaViolation(table, n, "gdp_usd", "must be non-negative")
        out.append(CountryMeta(iso3, r["name"], r["m49_subregion"], continent, r["iucn_region"], land, gdp))
    return out


def _load_hazards(path: Path) -> list[HazardObservation]:
    table = "hazards"
    out, seen = [], {}
    for n, r in _read_rows(path, table, FILES[table][1]):
        kind = r["hazard_kind"].lower()
        if kind not in HAZARD_KINDS:
            raise SchemaViolation(table, n, "hazard_kind", f"unknown hazard {r['hazard_kind']!r}")
        scope = r["region_scope"].lower()
        if scope not in REGION_SCOPES:
            raise SchemaViolation(table, n, "region_scope", f"unknown scope {r['region_scope']!r}")
        year = _int(table, n, "year", r["year"])
        _unique(table, seen, (kind, r["region_code"], year), n, "year")
        value = _float(table, n, "value", r["value"])
        out.append(HazardObservation(kind, scope, r["region_code"], year, value))
    return out


def _load_firms(path: Path) -> list[FirmRecord]:
    table = "firms"
    out, seen = [], {}
    for n, r in _read_rows(path, table, FILES[table][1]):
        _unique(table, seen, r["firm_id"], n, "firm_id")
        if not NACE_PATTERN.match(r["nace4"]):
            raise SchemaViolation(table, n, "nace4", f"expected 'dd.dd', got {r['nace4']!r}")
        vol = _float(table, n, "volatility_ann", r["volatility_ann"])
        lev = _float(table, n, "leverage_debt_to_assets", r["leverage_debt_to_assets"])
        if vol < 0:
            raise SchemaViolation(table, n, "volatility_ann", "must be non-negative")
        if lev < 0:
            raise SchemaViolation(table, n, "leverage_debt_to_assets", "must be non-negative")
        out.append(FirmRecord(r["firm_id"], r["name"], r["nace4"], vol, lev))
    return out


def _load_revenues(path: Path) -> list[RevenueRow]:
    table = "revenues"
    out, seen = [], {}
    for n, r in _read_rows(path, table, FILES[table][1]):
        _unique(table, seen, (r["firm_id"], r["region_code"]), n, "region_code")
        rev = _float(table, n, "revenue", r["revenue"])
        if rev < 0:
            raise SchemaViolation(table, n, "revenue", "negative revenue")
        out.append(RevenueRow(r["firm_id"], r["region_code"], rev))
    return out


def _load_dependencies(path: Path) -> list[DependencyRow]:
    table = "dependencies"
    out, seen = [], {}
    for n, r in _read_rows(path, table, FILES[table][1]):
        _unique(table, seen, (r["production_process"], r["ecosystem_service"]), n, "ecosystem_service")
        rating = normalize_rating(r["materiality_rating"])
        if rating is None:
            raise SchemaViolation(table, n, "materiality_rating", f"unknown rating {r['materiality_rating']!r}")
        out.append(DependencyRow(r["production_process"], r["ecosystem_service"], rating))
    return out


def _load_crosswalk(path: Path) -> list[CrosswalkRow]:
    table = "crosswalk"
    out = []
    for n, r in _read_rows(path, table, FILES[table][1]):
        if not NACE_PATTERN.match(r["nace4"]):
            raise SchemaViolation(table, n, "nace4", f"expected 'dd.dd', got {r['nace4']!r}")
        # repeated rows are legal upstream; consumers deduplicate
        out.append(CrosswalkRow(r["nace4"], r["production_process"]))
    return out


def _load_aggregates(path: Path) -> dict[str, list[str]]:
    table = "region_aggregates"
    out: dict[str, list[str]] = defaultdict(list)
    seen: dict = {}
    for n, r in _read_rows(path, table, AGGREGATES_FILE[1]):
        iso3 = r["iso3"].upper()
        _unique(table, seen, (r["aggregate_code"], iso3), n, "iso3")
        out[r["aggregate_code"]].append(iso3)
    return out


def build_dataset(
    countries: Iterable[CountryMeta],
    hazards: Iterable[HazardObservation],
    firms: Iterable[FirmRecord],
    revenues: Iterable[RevenueRow],
    dependencies: Iterable[DependencyRow],
    crosswalk: Iterable[CrosswalkRow],
    aggregates: dict[str, Iterable[str]] | None = None,
) -> Dataset:
    """Sort every table and check cross-table references."""
    ds = Dataset(
        countries=tuple(sorted(countries, key=lambda c: c.iso3)),
        hazards=tuple(sorted(hazards, key=lambda h: (h.hazard_kind, h.region_code, h.year))),
        firms=tuple(sorted(firms, key=lambda f: f.firm_id)),
        revenues=tuple(sorted(revenues, key=lambda r: (r.firm_id, r.region_code))),
        dependencies=tuple(sorted(dependencies, key=lambda d: (d.production_process, d.ecosystem_service))),
        crosswalk=tuple(sorted(crosswalk, key=lambda x: (x.nace4, x.production_process))),
        aggregates=tuple(sorted((code, tuple(sorted(members))) for code, members in (aggregates or {}).items())),
    )
    _check_references(ds)
    return ds


def _check_references(ds: Dataset) -> None:
    countries = ds.country_map
    for code, members in ds.aggregates:
        if code in countries or code == REST_OF_WORLD:
            raise DanglingReference("region_aggregates", f"{code} shadows a country code")
        if not members:
            raise DanglingReference("region_aggregates", code)
        for iso3 in members:
            if iso3 not in countries:
                raise DanglingReference("region_aggregates", iso3)
    aggregates = ds.aggregate_map
    firms = ds.firm_map
    for row in ds.revenues:
        if row.firm_id not in firms:
            raise DanglingReference("revenues", row.firm_id)
        code = row.region_code
        if code not in countries and code not in aggregates and code != REST_OF_WORLD:
            raise DanglingReference("revenues", code)
    processes = {d.production_process for d in ds.dependencies}
    for row in ds.crosswalk:
        if row.production_process not in processes:
            raise DanglingReference("nace_crosswalk", row.production_process)


def load_dataset(data_dir: str | Path) -> Dataset:
    """Parse every schema file under ``data_dir`` into a :class:`Dataset`."""
    data_dir = Path(data_dir)
    loaders = {
        "countries": _load_countries,
        "hazards": _load_hazards,
        "firms": _load_firms,
        "revenues": _load_revenues,
        "dependencies": _load_dependencies,
        "crosswalk": _load_crosswalk,
    }
    for name, (fname, _) in FILES.items():
        if not (data_dir / fname).is_file():
            raise MissingFile(data_dir / fname)
    tables = {name: loader(data_dir / FILES[name][0]) for name, loader in loaders.items()}
    agg_path = data_dir / AGGREGATES_FILE[0]
    aggregates = _load_aggregates(agg_path) if agg_path.is_file() else {}
    return build_dataset(aggregates=aggregates, **tables)


def input_files(data_dir: str | Path) -> list[Path]:
    data_dir = Path(data_dir)
    paths = [data_dir / fname for fname, _ in FILES.values()]
    if (data_dir / AGGREGATES_FILE[0]).is_file():
        paths.append(data_dir / AGGREGATES_FILE[0])
    return sorted(paths)


def write_dataset(ds: Dataset, out_dir: str | Path) -> None:
    """Serialize ``ds`` in the same schema :func:`load_dataset` reads."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = {
        "countries": [(c.iso3, c.name, c.m49_subregion, c.continent, c.iucn_region, repr(c.land_area), repr(c.gdp)) for c in ds.countries],
        "hazards": [(h.hazard_kind, h.region_scope, h.region_code, h.year, repr(h.value)) for h in ds.hazards],
        "firms": [(f.firm_id, f.name, f.nace4, repr(f.volatility), repr(f.leverage)) for f in ds.firms],
        "revenues": [(r.firm_id, r.region_code, repr(r.revenue)) for r in ds.revenues],
        "dependencies": [(d.production_process, d.ecosystem_service, d.rating) for d in ds.dependencies],
        "crosswalk": [(x.nace4, x.production_process) for x in ds.crosswalk],
    }
    for name, (fname, header) in FILES.items():
        _write_csv(out_dir / fname, header, rows[name])
    if ds.aggregates:
        agg_rows = [(code, iso3) for code, members in ds.aggregates for iso3 in members]
        _write_csv(out_dir / AGGREGATES_FILE[0], AGGREGATES_FILE[1], agg_rows)


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# -- hazard source resolution ------------------------------------------------

_SCOPE_RANK = {scope: i for i, scope in enumerate(REGION_SCOPES)}


@dataclass(frozen=True)
class HazardSource:
    """Where a country's series for one hazard comes from.

    ``mode`` is ``"direct"`` (a published series at native or finer
    granularity), ``"coarser"`` (a coarser published series), ``"continent_average"``
    (land-weighted mean of the continent's resolved paths) or ``"missing"``.
    """

    iso3: str
    hazard_kind: str
    mode: str
    region_code: str | None = None
    region_scope: str | None = None

    @property
    def flagged(self) -> bool:
        return self.mode != "direct"


def _candidate_codes(country: CountryMeta) -> list[str]:
    return [country.iso3, country.iucn_region, country.m49_subregion, country.continent]


def _published_source(ds: Dataset, country: CountryMeta, kind: str) -> tuple[str, str] | None:
    scopes = ds.series_scope
    for code in _candidate_codes(country):
        if (kind, code) in scopes:
            return code, scopes[(kind, code)]
    global_codes = sorted(code for (k, code), scope in scopes.items() if k == kind and scope == "global")
    if global_codes:
        return global_codes[0], "global"
    return None


def resolve_hazard_source(ds: Dataset, iso3: str, kind: str) -> HazardSource:
    """Pick the series for ``(iso3, kind)``: country, subregion, continent, global."""
    country = ds.country_map[iso3]
    hit = _published_source(ds, country, kind)
    if hit is not None:
        code, scope = hit
        mode = "coarser" if _SCOPE_RANK[scope] > _SCOPE_RANK[NATIVE_SCOPE[kind]] else "direct"
        return HazardSource(iso3, kind, mode, code, scope)
    for other in ds.countries:
        if other.continent == country.continent and other.iso3 != iso3:
            if _published_source(ds, other, kind) is not None:
                return HazardSource(iso3, kind, "continent_average", country.continent, "continent")
    return HazardSource(iso3, kind, "missing")


def resolve_all_sources(ds: Dataset) -> dict[tuple[str, str], HazardSource]:
    return {(c.iso3, kind): resolve_hazard_source(ds, c.iso3, kind) for c in ds.countries for kind in HAZARD_KINDS}


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class ValidationIssue:
    level: str  # "error" | "warning"
    table: str
    message: str


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def errors(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.level == "error"]

    @property
    def warnings(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.level == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def error_counts(self) -> dict[str, int]:
        counts: dict[str, int] = defaultdict(int)
        for issue in self.errors:
            counts[issue.table] += 1
        return dict(sorted(counts.items()))

    def error(self, table: str, message: str) -> None:
        self.issues.append(ValidationIssue("error", table, message))

    def warn(self, table: str, message: str) -> None:
        self.issues.append(ValidationIssue("warning", table, message))


def validate_dataset(ds: Dataset) -> ValidationReport:
    """Range and coverage checks. Errors block the pipeline, warnings do not."""
    report = ValidationReport()
    countries = ds.country_map

    for h in ds.hazards:
        where = f"{h.hazard_kind}/{h.region_code}/{h.year}"
        if not YEAR_RANGE[0] <= h.year <= YEAR_RANGE[1]:
            report.error("hazards", f"{where}: year outside {YEAR_RANGE}")
        if h.hazard_kind == "biodiversity" and not 0.0 <= h.value <= 1.0:
            report.error("hazards", f"{where}: Red List Index {h.value} outside [0, 1]")
        if h.hazard_kind == "land_degradation" and not 0.0 <= h.value <= 100.0:
            report.error("hazards", f"{where}: degraded land {h.value}% outside [0, 100]")
        if h.region_scope == "country" and h.region_code not in countries:
            report.error("hazards", f"{where}: country-scope series for unknown country")

    for f in ds.firms:
        if f.leverage > MAX_LEVERAGE:
            report.error("firms", f"{f.firm_id}: leverage {f.leverage} above {MAX_LEVERAGE}")
    revenues = ds.revenues_by_firm
    for f in ds.firms:
        if sum(revenues.get(f.firm_id, {}).values()) <= 0:
            report.error("revenues", f"{f.firm_id}: total revenue is not positive")

    mapped = {x.nace4 for x in ds.crosswalk}
    for f in ds.firms:
        if f.nace4 not in mapped:
            report.error("nace_crosswalk", f"{f.firm_id}: NACE {f.nace4} has no production process")
        try:
            f.sector_group
        except KeyError:
            report.error("firms", f"{f.firm_id}: NACE {f.nace4} belongs to no industry group")

    gdp = {c.iso3: c.gdp for c in ds.countries}
    for code, members in ds.aggregates:
        if sum(gdp[m] for m in members) <= 0:
            report.error("region_aggregates", f"{code}: member GDP sums to zero")

    for (iso3, kind), src in sorted(resolve_all_sources(ds).items()):
        if src.mode == "coarser":
            report.warn("hazards", f"{iso3}: {kind} falls back to {src.region_scope} series {src.region_code}")
        elif src.mode == "continent_average":
            report.warn("hazards", f"{iso3}: {kind} uses the land-weighted {src.region_code} continent average")
        elif src.mode == "missing":
            report.warn("hazards", f"{iso3}: no {kind} series resolvable, hazard dropped from the mean")
    return report
