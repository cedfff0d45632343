"""Report stage: summary tables, histogram data and figures from pipeline outputs.

Reads the tables written by the earlier stages from an output directory and
writes everything under ``<out>/report/``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from naturisk import plotting
from naturisk.errors import EmptyInput, MissingFile
from naturisk.outputs import read_table, write_table
from naturisk.sectors import SECTOR_DESCRIPTIONS, SECTOR_ORDER
from naturisk.valuation import PERCENTILES, distribution_stats

HIST_BINS = 50
HIST_RANGE = (-1.0, 0.0)
TOP_N = 10


@dataclass
class Report:
    horizon: int
    countries: list[tuple[str, str, float]]  # (iso3, name, cdi at horizon)
    regions: list[tuple[str, float]]
    sectors: list[tuple[str, int, float]]  # (group, n firms, mean combined loss)
    stats: object
    hist_edges: np.ndarray
    hist_counts: np.ndarray
    top_firms: list[dict]
    hazard_damages: dict[str, list[float]] = field(default_factory=dict)


def loss_histogram(losses, bins: int = HIST_BINS, value_range=HIST_RANGE) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width bin edges and counts over ``value_range``."""
    counts, edges = np.histogram(np.asarray(losses, dtype=float), bins=bins, range=value_range)
    return edges, counts


def _require(out_dir: Path, name: str) -> list[dict[str, str]]:
    rows = read_table(out_dir, name)
    if rows is None:
        raise MissingFile(out_dir / f"{name}.csv")
    return rows


def build_report(out_dir: str | Path, names: dict[str, str] | None = None) -> Report:
    out_dir = Path(out_dir)
    names = names or {}
    cdi_rows = _require(out_dir, "cdi")
    loss_rows = _require(out_dir, "losses")
    if not loss_rows:
        raise EmptyInput("losses table is empty")

    horizon = max(int(r["year"]) for r in cdi_rows) if cdi_rows else 0
    countries = sorted(
        ((r["iso3"], names.get(r["iso3"], r["iso3"]), float(r["cdi"])) for r in cdi_rows if int(r["year"]) == horizon),
        key=lambda c: (c[1], c[0]),
    )
    regions = [
        (r["region_code"], float(r["cdi"])) for r in (read_table(out_dir, "regions") or []) if int(r["year"]) == horizon
    ]

    losses = [float(r["loss_combined"]) for r in loss_rows]
    by_sector: dict[str, list[float]] = defaultdict(list)
    for r in loss_rows:
        by_sector[r["sector_group"]].append(float(r["loss_combined"]))
    sectors = [
        (code, len(vals), sum(vals) / len(vals))
        for code, vals in sorted(by_sector.items(), key=lambda kv: SECTOR_ORDER.get(kv[0], len(SECTOR_ORDER)))
    ]

    ranked = sorted(loss_rows, key=lambda r: (-float(r["nrs"]), r["firm_id"]))[:TOP_N]
    edges, counts = loss_histogram(losses)

    hazard_damages: dict[str, list[float]] = defaultdict(list)
    for r in read_table(out_dir, "hazard_damage") or []:
        if int(r["year"]) == horizon:
            hazard_damages[r["hazard_kind"]].append(float(r["damage"]))

    return Report(horizon, countries, regions, sectors, distribution_stats(losses), edges, counts, ranked, dict(hazard_damages))


def _pct(x: float) -> str:
    return f"{100.0 * x:6.1f}%"


def render_text(rep: Report) -> str:
    lines = [f"Nature risk report, horizon {rep.horizon}", ""]
    lines.append(f"Country Degradation Index ({len(rep.countries)} countries)")
    for i, (iso3, name, cdi) in enumerate(rep.countries, start=1):
        lines.append(f"{i:4d} {name[:28]:<28} {iso3}  {_pct(cdi)}")
    if rep.regions:
        lines += ["", "Land-weighted regional CDI"]
        lines += [f"     {code:<33} {_pct(cdi)}" for code, cdi in rep.regions]
    lines += ["", "Expected loss by sector"]
    for code, n, loss in rep.sectors:
        desc = SECTOR_DESCRIPTIONS.get(code, "")
        lines.append(f"     {code:<9} {_pct(loss)}  n={n:<4d} {desc}")
    s = rep.stats
    lines += ["", f"Loss distribution ({s.n} firms, equal-weighted)"]
    lines.append(f"     mean {_pct(s.mean)}   min {_pct(s.min)}   max {_pct(s.max)}")
    lines.append("     " + "  ".join(f"p{p} {_pct(v).strip()}" for p, v in s.percentiles.items()))
    lines += ["", f"Highest nature risk (top {len(rep.top_firms)})"]
    for i, r in enumerate(rep.top_firms, start=1):
        lines.append(f"{i:4d} {r['firm_id']:<12} {r['sector_group']:<9} NRS {float(r['nrs']):.3f}  loss {_pct(float(r['loss_combined']))}")
    return "\n".join(lines) + "\n"


def write_report(out_dir: str | Path, names: dict[str, str] | None = None, fmt: str = "csv", figures: bool = True) -> list[Path]:
    """Build the report from ``out_dir`` and write it to ``out_dir/report``."""
    out_dir = Path(out_dir)
    rep = build_report(out_dir, names)
    dest = out_dir / "report"
    dest.mkdir(parents=True, exist_ok=True)
    written = [
        write_table(dest, "country_table", [(i, iso3, name, cdi) for i, (iso3, name, cdi) in enumerate(rep.countries, 1)], fmt,
                    header=("no", "iso3", "name", "cdi")),
        write_table(dest, "region_table", rep.regions, fmt, header=("region_code", "cdi")),
        write_table(dest, "sector_table", [(c, n, loss, SECTOR_DESCRIPTIONS.get(c, "")) for c, n, loss in rep.sectors], fmt,
                    header=("sector_group", "n_firms", "mean_loss", "description")),
        write_table(dest, "loss_histogram",
                    [(float(rep.hist_edges[i]), float(rep.hist_edges[i + 1]), int(rep.hist_counts[i])) for i in range(len(rep.hist_counts))],
                    fmt, header=("bin_left", "bin_right", "count")),
        write_table(dest, "distribution",
                    [("n", rep.stats.n), ("mean", rep.stats.mean), ("min", rep.stats.min), ("max", rep.stats.max)]
                    + [(f"p{p}", rep.stats.percentiles[p]) for p in PERCENTILES],
                    fmt, header=("statistic", "value")),
        write_table(dest, "top_risk_firms",
                    [(i, r["firm_id"], r["sector_group"], float(r["nrs"]), float(r["loss_combined"])) for i, r in enumerate(rep.top_firms, 1)],
                    fmt, header=("rank", "firm_id", "sector_group", "nrs", "loss_combined")),
    ]
    text_path = dest / "report.txt"
    text_path.write_text(render_text(rep), encoding="utf-8")
    written.append(text_path)
    if figures:
        fig_dir = dest / "figures"
        fig_dir.mkdir(exist_ok=True)
        if rep.countries:
            written.append(plotting.plot_cdi_by_country({iso3: cdi for iso3, _, cdi in rep.countries}, fig_dir / "cdi_by_country.png", rep.horizon))
        if rep.hazard_damages:
            written.append(plotting.plot_hazard_damage_range(rep.hazard_damages, fig_dir / "hazard_damage_range.png", rep.horizon))
        written.append(plotting.plot_loss_histogram(rep.hist_edges, rep.hist_counts, rep.stats.mean, fig_dir / "loss_histogram.png"))
        written.append(plotting.plot_sector_losses([(c, loss) for c, _, loss in rep.sectors], fig_dir / "sector_losses.png"))
    return written
