#!/usr/bin/env python3
"""Brute-force recomputation of the demo-world pipeline.

Deliberately independent of the ``naturisk`` package: it reads the CSV files
with the csv module, fits trends by solving the normal equations in exact
rational arithmetic, and evaluates every formula with plain loops. The test
suite compares its output against the engine value by value.

Usage:
    python3 scripts/naive_oracle.py data/demo_world [--out oracle.json]
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

T0 = 2022
HORIZON = 2050
TEMP_THRESHOLD = 3.0
POP_GROWTH = 0.5
STEEPNESS = 10.0
MIDPOINT = 0.5
PI_TIPPING = 0.289
WACC = 0.0726
GROWTH = 0.0259
CF_BASE = 5.0

HAZARDS = ["biodiversity", "land_degradation", "global_warming", "population", "natural_capital"]
RATING = {"none": 0.0, "very_low": 0.2, "low": 0.4, "medium": 0.6, "high": 0.8, "very_high": 1.0}

# (first division, last division, group code)
GROUPS = [
    (1, 3, "A01-03"), (5, 9, "B05-B09"), (10, 12, "C10-C12"), (13, 18, "C13-C18"), (19, 19, "C19"),
    (20, 20, "C20"), (21, 22, "C21-C22"), (23, 23, "C23"), (24, 25, "C24-C25"), (26, 28, "C26-C28"),
    (29, 30, "C29-C30"), (31, 33, "C31-33"), (35, 35, "D35"), (36, 39, "E36-E39"), (41, 43, "F41-F43"),
    (45, 47, "G45-G47"), (49, 49, "H49"), (50, 50, "H50"), (51, 51, "H51"), (52, 53, "H52-H53"),
    (55, 56, "I55-I56"), (58, 63, "J58-J63"), (64, 66, "K64-K66"), (68, 68, "L68"), (69, 75, "M69-M75"),
    (77, 82, "N77-N82"), (84, 84, "O84"), (85, 85, "P85"), (86, 88, "Q86-Q88"), (90, 93, "R90-R93"),
    (94, 96, "S94-S96"),
]


def read(path):
    with open(path, newline="", encoding="utf-8-sig") as fh:
        return list(csv.DictReader(fh))


def solve(matrix, rhs):
    """Gauss-Jordan elimination on Fractions."""
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[pivot] = a[pivot], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [a[r][k] - f * a[col][k] for k in range(n + 1)]
    return [a[i][n] / a[i][i] for i in range(n)]


def lsq(xs, ys, degree):
    """Exact least-squares polynomial coefficients, ascending powers."""
    m = degree + 1
    xs = [Fraction(x) for x in xs]
    normal = [[sum(x ** (i + j) for x in xs) for j in range(m)] for i in range(m)]
    rhs = [sum(Fraction(y) * x ** i for x, y in zip(xs, ys)) for i in range(m)]
    return solve(normal, rhs)


def evaluate(coef, x):
    return sum(c * x ** i for i, c in enumerate(coef))


def value_at(series, year):
    if year in series:
        return series[year]
    ys = sorted(series)
    for lo, hi in zip(ys, ys[1:]):
        if lo < year < hi:
            return series[lo] + (series[hi] - series[lo]) * Fraction(year - lo, hi - lo)
    raise SystemExit(f"series does not cover {year}")


def logistic(x):
    return 1.0 / (1.0 + math.exp(-STEEPNESS * (x - MIDPOINT)))


def sector(nace):
    division = int(nace[:2])
    for lo, hi, code in GROUPS:
        if lo <= division <= hi:
            return code
    raise SystemExit(f"no group for {nace}")


def run(data_dir):
    d = Path(data_dir)
    countries = read(d / "countries.csv")
    years = list(range(T0 + 1, HORIZON + 1))

    series = {}
    for row in read(d / "hazards.csv"):
        key = (row["hazard_kind"], row["region_code"])
        series.setdefault(key, {})[int(row["year"])] = Fraction(row["value"])
    global_code = {row["hazard_kind"]: row["region_code"] for row in read(d / "hazards.csv") if row["region_scope"] == "global"}

    # hazard paths per country: ("intensity", [lambda...]) or ("pressure", [p...])
    paths = {}
    for c in countries:
        for kind in HAZARDS:
            codes = [c["iso3"], c["iucn_region"], c["m49_subregion"], c["continent"], global_code.get(kind)]
            obs = next((series[(kind, code)] for code in codes if (kind, code) in series), None)
            if obs is None:
                raise SystemExit(f"{c['iso3']} has no {kind} series; the oracle covers direct lookups only")
            if kind in ("biodiversity", "natural_capital"):
                scale = 100 if kind == "natural_capital" else 1
                xs = [y for y in sorted(obs) if y - 1 in obs]
                ys = [(obs[y] - obs[y - 1]) / scale for y in xs]
                coef = lsq(xs, ys, 3 if kind == "biodiversity" else 1)
                lam = [-float(evaluate(coef, t)) for t in years]
                paths[(c["iso3"], kind)] = ("intensity", [max(-1.0, min(1.0, v)) for v in lam])
            elif kind == "land_degradation":
                xs = sorted(obs)
                coef = lsq(xs, [obs[y] / 100 for y in xs], 1)
                paths[(c["iso3"], kind)] = ("intensity", [max(-1.0, min(1.0, float(coef[1])))] * len(years))
            else:
                v0 = float(value_at(obs, T0))
                vT = float(value_at(obs, HORIZON))
                thr = TEMP_THRESHOLD if kind == "global_warming" else v0 * (1 + POP_GROWTH)
                pres = []
                for t in years:
                    vt = v0 + (vT - v0) * (t - T0) / (HORIZON - T0)
                    pres.append(max(0.0, min(1.0, (vt - v0) / (thr - v0))))
                paths[(c["iso3"], kind)] = ("pressure", pres)

    cdi = {}
    for c in countries:
        out = {}
        for i, t in enumerate(years):
            damages = []
            for kind in HAZARDS:
                form, vals = paths[(c["iso3"], kind)]
                if form == "intensity":
                    total = 0.0
                    for j in range(i + 1):
                        total += vals[j]
                    ep = 1.0 - math.exp(-total)
                else:
                    ep = vals[i]
                damages.append(ep + (1.0 - ep) * logistic(ep))
            dbar = min(1.0, max(0.0, math.fsum(damages) / len(damages)))
            p = (1.0 - dbar) * logistic(dbar)
            out[t] = min(1.0, dbar + p * (1.0 - dbar) * PI_TIPPING)
        cdi[c["iso3"]] = out

    land = {c["iso3"]: float(c["land_area_km2"]) for c in countries}
    world = {}
    for t in years:
        num = sum(land[k] * cdi[k][t] for k in sorted(cdi))
        world[t] = num / sum(land[k] for k in sorted(cdi))
    cdi_all = dict(cdi)
    cdi_all["REST_OF_WORLD"] = world

    gdp = {c["iso3"]: float(c["gdp_usd"]) for c in countries}
    members = {}
    agg_path = d / "region_aggregates.csv"
    if agg_path.exists():
        for row in read(agg_path):
            members.setdefault(row["aggregate_code"], []).append(row["iso3"])

    revenue = {}
    for row in read(d / "revenues.csv"):
        revenue.setdefault(row["firm_id"], []).append((row["region_code"], float(row["revenue"])))

    dependencies = {}
    for row in read(d / "encore_dependencies.csv"):
        rating = row["materiality_rating"].strip().lower().replace(" ", "_").replace("-", "_")
        dependencies.setdefault(row["production_process"], []).append(RATING[rating])
    crosswalk = {}
    for row in read(d / "nace_crosswalk.csv"):
        crosswalk.setdefault(row["nace4"], set()).add(row["production_process"])
    vs = {}
    for nace, processes in crosswalk.items():
        maxima = [max(dependencies[p]) for p in sorted(processes)]
        vs[nace] = math.fsum(maxima) / len(maxima)

    firms = read(d / "firms.csv")
    exposure = {}
    for f in firms:
        rows = revenue[f["firm_id"]]
        total = math.fsum(v for _, v in rows)
        shares = {}
        for code, v in rows:
            if code in members:
                g = math.fsum(gdp[m] for m in members[code])
                for m in members[code]:
                    shares[m] = shares.get(m, 0.0) + v * gdp[m] / g / total
            else:
                key = code if code in cdi_all else "REST_OF_WORLD"
                shares[key] = shares.get(key, 0.0) + v / total
        exposure[f["firm_id"]] = shares

    nrs = {}
    for f in firms:
        shares = exposure[f["firm_id"]]
        nrs[f["firm_id"]] = {}
        for t in years:
            acc = 0.0
            for iso3 in sorted(shares):
                acc += cdi_all[iso3][t] * shares[iso3]
            nrs[f["firm_id"]][t] = vs[f["nace4"]] * acc

    groups = {}
    for f in firms:
        groups.setdefault(sector(f["nace4"]), []).append(f)
    mult = {}
    for code, fs in groups.items():
        if len(fs) < 2:
            for f in fs:
                mult[f["firm_id"]] = (1.0, 1.0)
            continue
        sbar = math.fsum(float(f["volatility_ann"]) for f in fs) / len(fs)
        lbar = math.fsum(float(f["leverage_debt_to_assets"]) for f in fs) / len(fs)
        for f in fs:
            s = float(f["volatility_ann"]) / sbar if sbar > 0 else 1.0
            lv = float(f["leverage_debt_to_assets"]) / lbar if lbar > 0 else 1.0
            mult[f["firm_id"]] = (s, lv)

    def dcf(path):
        n = len(path)
        v = 0.0
        for t in range(1, n):
            v += CF_BASE * (1 + GROWTH) ** t * (1 - path[t - 1]) / (1 + WACC) ** t
        v += CF_BASE * (1 + GROWTH) ** n * (1 + GROWTH) * (1 - path[n - 1]) / ((WACC - GROWTH) * (1 + WACC) ** n)
        return v

    v0 = dcf([0.0] * len(years))
    losses = {}
    for f in firms:
        fid = f["firm_id"]
        s, lv = mult[fid]
        sm = max(-1.0, -nrs[fid][HORIZON] * s * lv)
        dl = max(-1.0, (dcf([nrs[fid][t] for t in years]) - v0) / v0 * lv)
        losses[fid] = {"loss_sm": sm, "loss_dcf": dl, "loss_combined": (sm + dl) / 2}

    return {
        "v0": v0,
        "cdi": {k: {str(t): v for t, v in s.items()} for k, s in cdi.items()},
        "world": {str(t): v for t, v in world.items()},
        "vs": vs,
        "multipliers": {k: list(v) for k, v in mult.items()},
        "nrs": {k: {str(t): v for t, v in s.items()} for k, s in nrs.items()},
        "losses": losses,
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("data_dir")
    parser.add_argument("--out", help="write JSON here instead of stdout")
    args = parser.parse_args(argv)
    text = json.dumps(run(args.data_dir), indent=1, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
