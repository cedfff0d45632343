#!/usr/bin/env python3
"""Regenerate tests/golden from a fresh run-all on the demo world.

Only run this after confirming a behaviour change is intended; the golden
files are what the CLI tests compare against byte for byte.
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path

from naturisk.cli import main

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"
FILES = ("projections.csv", "cdi.csv", "vs.csv", "exposures.csv", "nrs.csv", "losses.csv", "sector_losses.csv", "report/report.txt")


def regenerate() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        code = main(["run-all", "--data-dir", str(ROOT / "data" / "demo_world"), "--out", tmp, "--no-figures"])
        if code:
            return code
        GOLDEN.mkdir(exist_ok=True)
        for name in FILES:
            shutil.copyfile(Path(tmp) / name, GOLDEN / Path(name).name)
            print(f"wrote {GOLDEN / Path(name).name}")
    return 0


if __name__ == "__main__":
    sys.exit(regenerate())
