"""Command-line front end.

Every stage subcommand loads the dataset, computes what it needs on demand
and writes its tables plus a ``manifest.json`` into ``--out``. Exit codes:
0 success, 1 validation/data error, 2 I/O error, 3 configuration error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

from naturisk import __version__
from naturisk.config import load_config
from naturisk.errors import ConfigError, NatureRiskError, ValidationFailed
from naturisk.ingest import input_files, load_dataset, validate_dataset
from naturisk.outputs import (
    FORMATS,
    cdi_rows,
    exposure_rows,
    hazard_damage_rows,
    loss_rows,
    nrs_rows,
    projection_rows,
    region_rows,
    sector_loss_rows,
    vs_rows,
    write_table,
)
from naturisk.pipeline import Pipeline
from naturisk.report import write_report
from naturisk.valuation import sector_stats

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_CONFIG = 0, 1, 2, 3
MANIFEST = "manifest.json"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the manifest for fully reproducible runs
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = dt.datetime.fromtimestamp(int(epoch), dt.timezone.utc) if epoch else dt.datetime.now(dt.timezone.utc)
    return when.replace(microsecond=0).isoformat()


def write_manifest(out_dir: Path, command: str, cfg, data_dir: Path | None, outputs: list[Path], warnings: list[str]) -> Path:
    inputs = {p.name: _sha256(p) for p in input_files(data_dir)} if data_dir else {}
    manifest = {
        "tool": "naturisk",
        "version": __version__,
        "command": command,
        "timestamp": _timestamp(),
        "config": cfg.as_dict() if cfg else None,
        "inputs": inputs,
        "outputs": {p.relative_to(out_dir).as_posix(): _sha256(p) for p in sorted(set(outputs))},
        "warnings": warnings,
    }
    path = out_dir / MANIFEST
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


# -- stages ------------------------------------------------------------------


def stage_project(pipe: Pipeline, out: Path, fmt: str, args) -> list[Path]:
    return [write_table(out, "projections", projection_rows(pipe), fmt)]


def stage_cdi(pipe: Pipeline, out: Path, fmt: str, args) -> list[Path]:
    countries = getattr(args, "countries", None)
    return [
        write_table(out, "cdi", cdi_rows(pipe, countries), fmt),
        write_table(out, "hazard_damage", hazard_damage_rows(pipe, countries), fmt),
        write_table(out, "regions", region_rows(pipe), fmt),
    ]


def stage_vs(pipe: Pipeline, out: Path, fmt: str, args) -> list[Path]:
    return [write_table(out, "vs", vs_rows(pipe), fmt)]


def stage_score(pipe: Pipeline, out: Path, fmt: str, args) -> list[Path]:
    return [write_table(out, "exposures", exposure_rows(pipe), fmt), write_table(out, "nrs", nrs_rows(pipe), fmt)]


def stage_losses(pipe: Pipeline, out: Path, fmt: str, args) -> list[Path]:
    return [
        write_table(out, "losses", loss_rows(pipe), fmt),
        write_table(out, "sector_losses", sector_loss_rows(sector_stats(list(pipe.losses.values()))), fmt),
    ]


STAGES = {
    "project": stage_project,
    "cdi": stage_cdi,
    "vs": stage_vs,
    "score": stage_score,
    "losses": stage_losses,
}


def _country_names(data_dir: Path | None) -> dict[str, str]:
    if data_dir is None:
        return {}
    return {c.iso3: c.name for c in load_dataset(data_dir).countries}


def run(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fmt = args.format
    data_dir = Path(args.data_dir) if getattr(args, "data_dir", None) else None

    if args.command == "report":
        cfg = load_config(args.config) if args.config else None
        written = write_report(out, _country_names(data_dir), fmt, figures=not args.no_figures)
        write_manifest(out, "report", cfg, data_dir, written, [])
        print((out / "report" / "report.txt").read_text(encoding="utf-8"), end="")
        return EXIT_OK

    cfg = load_config(args.config)
    ds = load_dataset(data_dir)

    if args.command == "validate":
        report = validate_dataset(ds)
        for issue in report.issues:
            print(f"{issue.level.upper():7s} {issue.table}: {issue.message}")
        print(f"{len(report.errors)} error(s), {len(report.warnings)} warning(s)")
        return EXIT_OK if report.ok else EXIT_VALIDATION

    pipe = Pipeline(ds, cfg)
    stages = list(STAGES) if args.command == "run-all" else [args.command]
    written: list[Path] = []
    for name in stages:
        written += STAGES[name](pipe, out, fmt, args)
    if args.command == "run-all":
        written += write_report(out, {c.iso3: c.name for c in ds.countries}, fmt, figures=not args.no_figures)
    write_manifest(out, args.command, cfg, data_dir, written, pipe.warnings)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="naturisk", description="Nature-risk degradation, scoring and loss engine")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log warnings to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_data=True):
        p.add_argument("--data-dir", required=needs_data, help="directory holding the input CSV files")
        p.add_argument("--config", default=None, help="scenario key=value file (defaults if omitted)")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--format", choices=FORMATS, default="csv", help="table format (default: csv)")
        return p

    common(sub.add_parser("validate", help="check the input dataset"))
    common(sub.add_parser("project", help="project hazard paths to the horizon"))
    cdi = common(sub.add_parser("cdi", help="country degradation index per year"))
    cdi.add_argument("--countries", type=lambda s: [c.strip().upper() for c in s.split(",") if c.strip()],
                     default=None, help="comma-separated ISO3 subset for cdi output")
    common(sub.add_parser("vs", help="vulnerability scores per NACE code"))
    common(sub.add_parser("score", help="exposures and nature risk scores"))
    common(sub.add_parser("losses", help="stock-market, DCF and combined losses"))
    rep = common(sub.add_parser("report", help="tables and figures from previous outputs"), needs_data=False)
    rep.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    allp = common(sub.add_parser("run-all", help="every stage followed by the report"))
    allp.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationFailed as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        for issue in exc.report.errors:
            print(f"  {issue.table}: {issue.message}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NatureRiskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
