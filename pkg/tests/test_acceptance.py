"""Acceptance gate.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion.
"""

from __future__ import annotations

import json
import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import DEMO_DIR, ORACLE, SCENARIO
from naturisk.config import ScenarioConfig
from naturisk.degradation import cdi_from_mean_damage, damage, tipping_probability
from naturisk.projection import fit_linear, fit_poly3, map_threshold_pressure
from naturisk.valuation import baseline_value, dcf_value
from naturisk.vulnerability import vulnerability_score

ANALYTIC = "Analytic points to 1e-12, runtime < 1 s"
MONOTONE = "Monotonicity grid (damage strict, CDI non-decreasing), runtime < 1 s"
POPULATION = "Population damage cross-check 0.63 +/- 0.02"
DCF = "DCF calibration (V0 = 100 +/- 1; constant NRS gives (1-x)*V0 to 1e-9)"
ORACLE_EQ = "Oracle equivalence to 1e-12 relative, runtime < 10 s"
MULTIPLIERS = "Group-mean multipliers equal 1 +/- 1e-9"
RECOVERY = "Fit recovery to 1e-6 relative over 100 trials"
DETERMINISM = "Byte-identical run-all with NATURISK_THREADS 1 and 8"
SPOT_VS = "Vulnerability spot values: 23.51 -> 1.00, 73.11 -> 0.40"


@pytest.mark.criterion(ANALYTIC)
def test_analytic_points():
    start = time.perf_counter()
    checks = {
        "damage(0.5)": (damage(0.5), 0.75),
        "damage(1)": (damage(1.0), 1.0),
        "p(0.5)": (tipping_probability(0.5), 0.25),
        "p(1)": (tipping_probability(1.0), 0.0),
        "CDI(0.5)": (cdi_from_mean_damage(0.5, ScenarioConfig(pi_tipping=0.289)), 0.536125),
    }
    elapsed = time.perf_counter() - start
    for label, (got, want) in checks.items():
        assert abs(got - want) <= 1e-12, f"{label} = {got!r}, expected {want}"
    assert elapsed < 1.0


@pytest.mark.criterion(MONOTONE)
def test_monotonicity_grid():
    start = time.perf_counter()
    grid = np.linspace(0.0, 1.0, 1001)
    d = damage(grid)
    cdi = np.array([cdi_from_mean_damage(x) for x in grid])
    elapsed = time.perf_counter() - start
    assert np.all(np.diff(d) > 0)
    assert np.all(np.diff(cdi) >= 0)
    assert np.all(cdi >= grid) and np.all(cdi <= 1.0)
    assert elapsed < 1.0


@pytest.mark.criterion(POPULATION)
def test_population_damage_cross_check(cfg):
    # UN population: ~7.95 billion at end-2022, ~9.7 billion in 2050
    path = map_threshold_pressure({2022: 7.95e9, 2050: 9.7e9}, "population", cfg)
    pressure = path.value_at(2050)
    assert pressure == pytest.approx(1.75 / 3.975, rel=1e-12)
    assert abs(damage(pressure) - 0.63) <= 0.02


@pytest.mark.criterion(DCF)
def test_dcf_baseline_near_100():
    cfg = ScenarioConfig(wacc=0.0726, growth_g=0.0259, cf_base=5.0, t0=2022, horizon=2050)
    assert cfg.n_periods == 28
    v0 = dcf_value(np.zeros(28), cfg)
    assert abs(v0 - 100.0) <= 1.0, f"V0 = {v0!r} under the literal formula"


@pytest.mark.criterion(DCF)
@pytest.mark.parametrize("x", [0.0, 0.1, 0.33, 0.5, 0.9, 1.0])
def test_dcf_linear_in_constant_nrs(x, cfg):
    v0 = baseline_value(cfg)
    got = dcf_value(np.full(cfg.n_periods, x), cfg)
    assert math.isclose(got, (1.0 - x) * v0, rel_tol=1e-9, abs_tol=1e-9 * v0)


def _run_oracle() -> tuple[dict, float]:
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, str(ORACLE), str(DEMO_DIR)], capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout), time.perf_counter() - start


@pytest.mark.criterion(ORACLE_EQ)
def test_oracle_equivalence(demo_pipe):
    oracle, elapsed = _run_oracle()
    assert elapsed < 10.0

    mismatches = []

    def check(label, got, want):
        if not math.isclose(got, want, rel_tol=1e-12, abs_tol=0.0):
            mismatches.append(f"{label}: engine {got!r} oracle {want!r}")

    assert len(demo_pipe.degradation) == 6 and len(demo_pipe.losses) == 12
    n = 0
    for iso3, series in demo_pipe.degradation.items():
        assert len(series.hazard_damage) == 5
        for i, year in enumerate(series.years):
            check(f"cdi {iso3} {year}", float(series.cdi[i]), oracle["cdi"][iso3][str(year)])
            n += 1
    for i, year in enumerate(demo_pipe.cfg.years):
        check(f"world {year}", float(demo_pipe.regions["WLD"][i]), oracle["world"][str(year)])
    for firm_id, nrs in demo_pipe.nrs.items():
        for year, value in nrs.items():
            check(f"nrs {firm_id} {year}", value, oracle["nrs"][firm_id][str(year)])
            n += 1
    for firm_id, res in demo_pipe.losses.items():
        for key in ("loss_sm", "loss_dcf", "loss_combined"):
            check(f"{key} {firm_id}", getattr(res, key), oracle["losses"][firm_id][key])
            n += 1
    assert n == 6 * 28 + 12 * 28 + 12 * 3
    assert not mismatches, "\n".join(mismatches[:10])


@pytest.mark.criterion(MULTIPLIERS)
def test_group_mean_multipliers(demo_pipe, demo_ds):
    groups: dict[str, list[str]] = {}
    for firm in demo_ds.firms:
        groups.setdefault(firm.sector_group, []).append(firm.firm_id)
    assert any(len(members) > 1 for members in groups.values())
    for code, members in groups.items():
        sig = [demo_pipe.multipliers[f].sigma for f in members]
        lev = [demo_pipe.multipliers[f].leverage for f in members]
        assert abs(math.fsum(sig) / len(sig) - 1.0) <= 1e-9, code
        assert abs(math.fsum(lev) / len(lev) - 1.0) <= 1e-9, code


def _random_coef(rng, degree):
    magnitude = rng.uniform(0.1, 2.0, degree + 1)
    return magnitude * rng.choice([-1.0, 1.0], degree + 1)


@pytest.mark.criterion(RECOVERY)
@pytest.mark.parametrize("fit, degree", [(fit_poly3, 3), (fit_linear, 1)], ids=["poly3", "linear"])
def test_fit_recovery(fit, degree):
    rng = np.random.default_rng(20220101 + degree)
    worst = 0.0
    for _ in range(100):
        coef = _random_coef(rng, degree)
        n = int(rng.integers(degree + 1, 25))
        x = float(rng.integers(-10, 30)) + np.arange(n, dtype=float)
        y = np.polynomial.polynomial.polyval(x, coef)
        got = fit(list(zip(x, y))).coef
        worst = max(worst, float(np.max(np.abs(got - coef) / np.abs(coef))))
    assert worst <= 1e-6, f"worst relative coefficient error {worst:.3g}"


def _snapshot(out: Path) -> dict[str, bytes]:
    files = {}
    for path in sorted(out.rglob("*")):
        if not path.is_file():
            continue
        data = path.read_bytes()
        if path.name == "manifest.json":
            manifest = json.loads(data)
            manifest.pop("timestamp")
            data = json.dumps(manifest, sort_keys=True).encode()
        files[path.relative_to(out).as_posix()] = data
    return files


@pytest.mark.slow
@pytest.mark.criterion(DETERMINISM)
def test_run_all_thread_count_determinism(tmp_path):
    snapshots = []
    for threads in ("1", "8"):
        out = tmp_path / f"threads{threads}"
        env = dict(os.environ, NATURISK_THREADS=threads)
        env.pop("SOURCE_DATE_EPOCH", None)
        subprocess.run(
            [sys.executable, "-m", "naturisk", "run-all", "--data-dir", str(DEMO_DIR),
             "--config", str(SCENARIO), "--out", str(out)],
            env=env, check=True, capture_output=True,
        )
        snapshots.append(_snapshot(out))
    one, eight = snapshots
    assert sorted(one) == sorted(eight)
    assert any(name.endswith(".png") for name in one)
    differing = [name for name in one if one[name] != eight[name]]
    assert not differing


@pytest.mark.criterion(SPOT_VS)
def test_vulnerability_spot_values(demo_ds):
    cement = vulnerability_score("23.51", demo_ds.crosswalk, demo_ds.dependencies)
    advertising = vulnerability_score("73.11", demo_ds.crosswalk, demo_ds.dependencies)
    assert cement.score == 1.0
    assert advertising.score == 0.4
