from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from naturisk.config import ScenarioConfig
from naturisk.degradation import cdi_from_mean_damage, damage, mean_damage
from naturisk.exposure import exposure_shares
from naturisk.ingest import CrosswalkRow, DependencyRow
from naturisk.projection import fit_linear, fit_poly3, threshold_pressure
from naturisk.scoring import nature_risk_score
from naturisk.valuation import baseline_value, combined_loss, dcf_loss, dcf_value, stock_market_loss
from naturisk.vulnerability import RATING_SCORES, vulnerability_score

unit = st.floats(0.0, 1.0, allow_nan=False)
positive = st.floats(1e-3, 1e6, allow_nan=False)
CODES = ["AAA", "BBB", "CCC", "DDD", "EEE"]

revenues = st.dictionaries(st.sampled_from(CODES), positive, min_size=1)
cdi_map = st.fixed_dictionaries({c: unit for c in CODES})
nrs_paths = st.lists(unit, min_size=28, max_size=28)


class TestDamage:
    @given(unit, unit)
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert damage(lo) <= damage(hi)

    @given(unit)
    def test_bounds(self, ep):
        assert ep <= damage(ep) <= 1.0

    @given(st.lists(unit, min_size=1, max_size=6), st.randoms())
    def test_mean_permutation_invariant(self, values, rnd):
        shuffled = values[:]
        rnd.shuffle(shuffled)
        assert mean_damage(values) == mean_damage(shuffled)

    @given(unit)
    def test_cdi_bounds(self, dbar):
        assert dbar <= cdi_from_mean_damage(dbar) <= 1.0

    @given(unit, st.floats(0.0, 1.0))
    def test_cdi_monotone_in_pi(self, dbar, pi):
        low = cdi_from_mean_damage(dbar, ScenarioConfig(pi_tipping=pi / 2))
        assert low <= cdi_from_mean_damage(dbar, ScenarioConfig(pi_tipping=pi))


class TestThreshold:
    @given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-10, 10), st.floats(0.01, 20))
    def test_unit_interval_and_monotone(self, a, b, base, gap):
        lo, hi = sorted((a, b))
        p_lo, p_hi = threshold_pressure(lo, base, base + gap), threshold_pressure(hi, base, base + gap)
        assert 0.0 <= p_lo <= p_hi <= 1.0


class TestExposure:
    @given(revenues, st.floats(1e-3, 1e3))
    def test_scale_invariant(self, rev, k):
        base = exposure_shares(rev).shares
        scaled = exposure_shares({c: v * k for c, v in rev.items()}).shares
        assert base.keys() == scaled.keys()
        for c in base:
            assert scaled[c] == pytest.approx(base[c], rel=1e-12, abs=1e-15)

    @given(revenues)
    def test_shares_sum_to_one(self, rev):
        shares = exposure_shares(rev).shares
        assert math.fsum(shares.values()) == pytest.approx(1.0, abs=1e-12)
        assert all(0.0 <= s <= 1.0 for s in shares.values())

    @given(positive, st.lists(positive, min_size=1, max_size=4), revenues)
    def test_disaggregation_conserves(self, amount, gdps, rest):
        members = [f"M{i}" for i in range(len(gdps))]
        gdp = dict(zip(members, gdps))
        rev = dict(rest, AGG=amount)
        shares = exposure_shares(rev, {"AGG": members}, gdp).shares
        total = amount + math.fsum(rest.values())
        assert math.fsum(shares[m] for m in members) == pytest.approx(amount / total, rel=1e-9)
        for i, j in zip(members, members[1:]):
            assert shares[i] * gdp[j] == pytest.approx(shares[j] * gdp[i], rel=1e-9)


class TestScore:
    @given(revenues, cdi_map, unit)
    def test_bounds(self, rev, cdi, vs):
        shares = exposure_shares(rev).shares
        nrs = nature_risk_score(shares, cdi, vs)
        assert 0.0 <= nrs <= vs * max(cdi[c] for c in shares) * (1 + 1e-12)

    @given(revenues, cdi_map, unit, unit)
    def test_linear_in_vs(self, rev, cdi, a, b):
        shares = exposure_shares(rev).shares
        s = nature_risk_score(shares, cdi, 1.0)
        assert nature_risk_score(shares, cdi, a) + nature_risk_score(shares, cdi, b) == pytest.approx((a + b) * s, abs=1e-12)

    @given(revenues, cdi_map, unit, st.randoms())
    def test_insertion_order_invariant(self, rev, cdi, vs, rnd):
        shares = exposure_shares(rev).shares
        items = list(shares.items())
        rnd.shuffle(items)
        assert nature_risk_score(dict(items), cdi, vs) == nature_risk_score(shares, cdi, vs)

    @given(revenues, unit, unit)
    def test_uniform_cdi(self, rev, c, vs):
        shares = exposure_shares(rev).shares
        assert nature_risk_score(shares, {k: c for k in CODES}, vs) == pytest.approx(vs * c, abs=1e-12)


ratings = st.sampled_from(sorted(RATING_SCORES))


@st.composite
def dependency_tables(draw):
    processes = [f"P{i}" for i in range(draw(st.integers(1, 4)))]
    rows = []
    for p in processes:
        services = draw(st.lists(st.sampled_from(["water", "soil", "pollination", "climate"]), min_size=1, unique=True))
        rows += [DependencyRow(p, s, draw(ratings)) for s in services]
    return processes, rows


class TestVulnerability:
    @given(dependency_tables())
    def test_mean_of_process_maxima(self, table):
        processes, rows = table
        crosswalk = [CrosswalkRow("99.99", p) for p in processes]
        score = vulnerability_score("99.99", crosswalk, rows).score
        maxima = [max(RATING_SCORES[r.rating] for r in rows if r.production_process == p) for p in processes]
        assert score == pytest.approx(sum(maxima) / len(maxima), abs=1e-15)
        assert 0.0 <= score <= 1.0

    @given(dependency_tables(), st.randoms())
    def test_duplicate_crosswalk_rows_ignored(self, table, rnd):
        processes, rows = table
        crosswalk = [CrosswalkRow("99.99", p) for p in processes]
        doubled = crosswalk + [rnd.choice(crosswalk) for _ in range(3)]
        rnd.shuffle(doubled)
        assert vulnerability_score("99.99", doubled, rows).score == vulnerability_score("99.99", crosswalk, rows).score

    @given(dependency_tables())
    def test_adding_weaker_service_keeps_score(self, table):
        processes, rows = table
        crosswalk = [CrosswalkRow("99.99", p) for p in processes]
        extra = rows + [DependencyRow(p, "extra_service", "none") for p in processes]
        assert vulnerability_score("99.99", crosswalk, extra).score == vulnerability_score("99.99", crosswalk, rows).score


class TestValuation:
    cfg = ScenarioConfig()

    @given(nrs_paths, st.integers(0, 27), st.floats(0.0, 1.0))
    def test_dcf_monotone(self, path, i, bump):
        worse = path[:]
        worse[i] = min(1.0, worse[i] + bump)
        assert dcf_value(worse, self.cfg) <= dcf_value(path, self.cfg) + 1e-12

    @given(nrs_paths, nrs_paths, unit)
    def test_dcf_affine(self, a, b, w):
        mix = [w * x + (1 - w) * y for x, y in zip(a, b)]
        want = w * dcf_value(a, self.cfg) + (1 - w) * dcf_value(b, self.cfg)
        assert dcf_value(mix, self.cfg) == pytest.approx(want, rel=1e-12, abs=1e-12)

    @given(nrs_paths, unit, st.floats(0.0, 5.0), st.floats(0.0, 5.0))
    def test_losses_in_range(self, path, nrs_T, sig, lev):
        v0 = baseline_value(self.cfg)
        sm = stock_market_loss(nrs_T, sig, lev)
        dl = dcf_loss(dcf_value(path, self.cfg), v0, lev)
        assert -1.0 <= sm <= 0.0 and -1.0 <= dl <= 0.0
        assert min(sm, dl) <= combined_loss(sm, dl) <= max(sm, dl)

    @given(unit, st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
    def test_stock_market_loss_monotone_in_sigma(self, nrs_T, s1, s2, lev):
        lo, hi = sorted((s1, s2))
        assert stock_market_loss(nrs_T, hi, lev) <= stock_market_loss(nrs_T, lo, lev)


coefs = st.floats(0.1, 2.0).flatmap(lambda m: st.sampled_from([m, -m]))


class TestFits:
    @settings(max_examples=50)
    @given(st.lists(coefs, min_size=4, max_size=4), st.integers(-10, 30), st.integers(4, 25))
    def test_poly3_recovers_cubic(self, coef, start, n):
        x = np.arange(start, start + n, dtype=float)
        y = np.polynomial.polynomial.polyval(x, coef)
        assert np.allclose(fit_poly3(list(zip(x, y))).coef, coef, rtol=1e-6, atol=0)

    @given(coefs, coefs, st.integers(1900, 2100), st.integers(2, 30), st.integers(-200, 200))
    def test_linear_translation_equivariant(self, a, b, start, n, shift):
        x = np.arange(start, start + n, dtype=float)
        y = a + b * x
        fit = fit_linear(list(zip(x, y)))
        moved = fit_linear(list(zip(x + shift, y)))
        assert moved.slope == pytest.approx(fit.slope, rel=1e-9)
        assert moved(x[0] + shift) == pytest.approx(fit(x[0]), rel=1e-9, abs=1e-9)

    @given(st.lists(st.floats(-1, 1), min_size=5, max_size=20), st.floats(0.5, 4.0))
    def test_linear_scale_equivariant(self, ys, k):
        x = np.arange(len(ys), dtype=float) + 2000.0
        assume(np.ptp(ys) > 1e-6)
        fit = fit_linear(list(zip(x, ys)))
        scaled = fit_linear(list(zip(x, [k * y for y in ys])))
        assert scaled.slope == pytest.approx(k * fit.slope, rel=1e-9, abs=1e-12)
