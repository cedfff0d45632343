"""Output tables: row builders per stage and CSV/JSON serialization.

Floats are written with ``repr`` so every value round-trips exactly, and
rows are sorted by key so files are byte-stable.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from naturisk.ingest import HAZARD_KINDS

FORMATS = ("csv", "json")

HEADERS = {
    "projections": ("iso3", "hazard_kind", "method", "source_mode", "source_code", "year", "value"),
    "cdi": ("iso3", "year", "mean_damage", "tipping_prob", "tipping_damage", "cdi"),
    "hazard_damage": ("iso3", "hazard_kind", "year", "pressure", "damage"),
    "regions": ("region_code", "year", "cdi"),
    "vs": ("nace4", "score", "n_processes", "top_service"),
    "exposures": ("firm_id", "iso3", "share"),
    "nrs": ("firm_id", "year", "nrs"),
    "losses": ("firm_id", "sector_group", "nrs", "sigma_mult", "lev_mult", "loss_sm", "loss_dcf", "loss_combined"),
    "sector_losses": ("sector_group", "mean_loss"),
}


def _plain(value):
    # numpy scalars would otherwise serialize as "np.float64(...)"
    if isinstance(value, np.generic):
        return value.item()
    return value


def _cell(value):
    value = _plain(value)
    if isinstance(value, float):
        return repr(value)
    return value


def write_table(out_dir: Path, name: str, rows: Iterable[Sequence], fmt: str = "csv", header: Sequence[str] | None = None) -> Path:
    header = tuple(header or HEADERS[name])
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [tuple(_plain(v) for v in r) for r in rows]
    if fmt == "csv":
        path = out_dir / f"{name}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows([_cell(v) for v in r] for r in rows)
    elif fmt == "json":
        path = out_dir / f"{name}.json"
        records = [dict(zip(header, r)) for r in rows]
        path.write_text(json.dumps(records, indent=1) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_table(out_dir: Path, name: str) -> list[dict[str, str]] | None:
    """Rows of a previously written table as strings, or ``None`` if absent."""
    csv_path = out_dir / f"{name}.csv"
    json_path = out_dir / f"{name}.json"
    if csv_path.is_file():
        with csv_path.open(newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    if json_path.is_file():
        records = json.loads(json_path.read_text(encoding="utf-8"))
        return [{k: (repr(v) if isinstance(v, float) else str(v)) for k, v in r.items()} for r in records]
    return None


# -- row builders ------------------------------------------------------------


def projection_rows(pipe) -> list[tuple]:
    rows = []
    for (iso3, kind), path in pipe.country_paths.items():
        src = pipe.sources[(iso3, kind)]
        for year, value in zip(path.years, path.values):
            rows.append((iso3, kind, path.method, src.mode, src.region_code, year, float(value)))
    return rows


def cdi_rows(pipe, countries: Iterable[str] | None = None) -> list[tuple]:
    keep = set(countries) if countries else None
    rows = []
    for iso3, s in sorted(pipe.degradation.items()):
        if keep is not None and iso3 not in keep:
            continue
        for i, year in enumerate(s.years):
            rows.append(
                (iso3, year, float(s.mean_damage[i]), float(s.tipping_prob[i]), float(s.tipping_damage[i]), float(s.cdi[i]))
            )
    return rows


def hazard_damage_rows(pipe, countries: Iterable[str] | None = None) -> list[tuple]:
    keep = set(countries) if countries else None
    rows = []
    for iso3, s in sorted(pipe.degradation.items()):
        if keep is not None and iso3 not in keep:
            continue
        for kind in HAZARD_KINDS:
            if kind not in s.hazard_damage:
                continue
            for i, year in enumerate(s.years):
                rows.append((iso3, kind, year, float(s.hazard_pressure[kind][i]), float(s.hazard_damage[kind][i])))
    return rows


def region_rows(pipe) -> list[tuple]:
    years = list(pipe.cfg.years)
    return [(code, year, float(path[i])) for code, path in sorted(pipe.regions.items()) for i, year in enumerate(years)]


def vs_rows(pipe) -> list[tuple]:
    return [(code, v.score, v.n_processes, v.top_service) for code, v in sorted(pipe.vulnerability.items())]


def exposure_rows(pipe) -> list[tuple]:
    return [(fid, iso3, share) for fid, vec in sorted(pipe.exposures.items()) for iso3, share in sorted(vec.shares.items())]


def nrs_rows(pipe) -> list[tuple]:
    return [(fid, year, value) for fid, series in sorted(pipe.nrs.items()) for year, value in sorted(series.items())]


def loss_rows(pipe) -> list[tuple]:
    return [
        (r.firm_id, r.sector_group, r.nrs, r.sigma_mult, r.lev_mult, r.loss_sm, r.loss_dcf, r.loss_combined)
        for _, r in sorted(pipe.losses.items())
    ]


def sector_loss_rows(stats) -> list[tuple]:
    return [(s.sector_group, s.mean_loss) for s in stats]
