from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np
import pytest

from naturisk.errors import DomainError, EmptyInput, InvalidRates, UnmappedSector
from naturisk.sectors import SECTOR_CODES, sector_group
from naturisk.valuation import (
    BASELINE_V0,
    LossResult,
    baseline_value,
    combined_loss,
    dcf_loss,
    dcf_value,
    distribution_stats,
    sector_multipliers,
    sector_stats,
    stock_market_loss,
)


def closed_form_v0(wacc=0.0726, g=0.0259, cf=5.0, n=28):
    # geometric sum of the explicit years plus the growing perpetuity
    q = (1 + g) / (1 + wacc)
    explicit = cf * q * (1 - q ** (n - 1)) / (1 - q)
    terminal = cf * (1 + g) ** (n + 1) / ((wacc - g) * (1 + wacc) ** n)
    return explicit + terminal


class TestSectors:
    def test_thirty_one_groups(self):
        assert len(SECTOR_CODES) == 31
        assert SECTOR_CODES[0] == "A01-03" and SECTOR_CODES[-1] == "S94-S96"

    @pytest.mark.parametrize(
        "nace, group",
        [("01.11", "A01-03"), ("10.83", "C10-C12"), ("23.51", "C23"), ("35.11", "D35"), ("50.20", "H50"),
         ("61.10", "J58-J63"), ("64.19", "K64-K66"), ("73.11", "M69-M75"), ("85.10", "P85"), ("96.01", "S94-S96")],
    )
    def test_mapping(self, nace, group):
        assert sector_group(nace) == group

    @pytest.mark.parametrize("nace", ["04.00", "34.10", "97.00", "99.00"])
    def test_unmapped(self, nace):
        with pytest.raises(UnmappedSector):
            sector_group(nace)


class TestMultipliers:
    def test_mean_arithmetic(self):
        m = sector_multipliers({"a": 0.2, "b": 0.4}, {"a": 0.5, "b": 0.5})
        assert m["a"].sigma == pytest.approx(2 / 3) and m["b"].sigma == pytest.approx(4 / 3)
        assert m["a"].leverage == m["b"].leverage == 1.0
        assert not m["a"].degenerate

    def test_single_firm(self):
        m = sector_multipliers({"a": 0.9}, {"a": 2.0})["a"]
        assert (m.sigma, m.leverage, m.degenerate) == (1.0, 1.0, True)

    def test_all_equal(self):
        m = sector_multipliers({"a": 0.3, "b": 0.3, "c": 0.3}, {"a": 0.4, "b": 0.4, "c": 0.4})
        assert all(v.sigma == 1.0 and v.leverage == 1.0 for v in m.values())

    def test_zero_mean(self):
        m = sector_multipliers({"a": 0.0, "b": 0.0}, {"a": 0.2, "b": 0.6})
        assert m["a"].sigma == 1.0 and m["a"].degenerate
        assert m["b"].leverage == pytest.approx(1.5)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            sector_multipliers({}, {})

    def test_demo_world_golden(self, demo_pipe):
        assert demo_pipe.multipliers["F01"].sigma == pytest.approx(1.12, rel=1e-15)
        assert demo_pipe.multipliers["F07"].leverage == pytest.approx(1.0909090909090908, rel=1e-15)
        assert demo_pipe.multipliers["F03"].degenerate


class TestStockMarketLoss:
    def test_unit_multipliers(self):
        assert stock_market_loss(0.33, 1.0, 1.0) == -0.33

    def test_cap(self):
        assert -0.65 * 1.5 * 1.5 == pytest.approx(-1.4625)
        assert stock_market_loss(0.65, 1.5, 1.5) == -1.0

    def test_zero(self):
        assert stock_market_loss(0.0, 1.3, 0.7) == 0.0

    @pytest.mark.parametrize("args", [(1.2, 1, 1), (-0.1, 1, 1), (0.5, -1, 1)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            stock_market_loss(*args)


class TestDcf:
    def test_baseline_constant(self, cfg):
        assert baseline_value(cfg) == BASELINE_V0
        assert BASELINE_V0 == pytest.approx(closed_form_v0(), rel=1e-13)

    def test_all_destroyed(self, cfg):
        assert dcf_value(np.ones(28), cfg) == 0.0

    def test_half(self, cfg):
        assert dcf_value(np.full(28, 0.5), cfg) == pytest.approx(BASELINE_V0 / 2, rel=1e-15)

    def test_single_year_shock(self, cfg):
        nrs = np.zeros(28)
        nrs[4] = 0.5
        # year 5 cash flow halved
        drop = 0.5 * 5.0 * (1.0259 / 1.0726) ** 5
        assert BASELINE_V0 - dcf_value(nrs, cfg) == pytest.approx(drop, rel=1e-12)

    def test_terminal_shock(self, cfg):
        nrs = np.zeros(28)
        nrs[-1] = 1.0
        explicit = closed_form_v0() - 5.0 * 1.0259**29 / ((0.0726 - 0.0259) * 1.0726**28)
        assert dcf_value(nrs, cfg) == pytest.approx(explicit, rel=1e-12)

    def test_rates(self):
        # ScenarioConfig itself refuses wacc <= g, so pass a bare stand-in
        bad = SimpleNamespace(wacc=0.02, growth_g=0.03, cf_base=5.0)
        with pytest.raises(InvalidRates):
            dcf_value(np.zeros(28), bad)

    def test_empty(self, cfg):
        with pytest.raises(EmptyInput):
            dcf_value([], cfg)


class TestDcfLoss:
    def test_no_change(self):
        assert dcf_loss(100.0, 100.0, 2.7) == 0.0

    def test_proportional(self):
        assert dcf_loss(80.0, 100.0, 1.0) == pytest.approx(-0.2)

    def test_cap(self):
        assert dcf_loss(50.0, 100.0, 2.5) == -1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            dcf_loss(50.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            dcf_loss(50.0, 100.0, -1.0)


class TestCombined:
    def test_mean(self):
        assert combined_loss(-0.4, -0.2) == pytest.approx(-0.3)
        assert combined_loss(0.0, 0.0) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            combined_loss(-1.2, 0.0)

    def test_golden_firm(self, demo_pipe):
        # frozen from scripts/naive_oracle.py
        f01 = demo_pipe.losses["F01"]
        assert f01.loss_sm == pytest.approx(-0.5407478906595669, rel=1e-12)
        assert f01.loss_dcf == pytest.approx(-0.266686563659736, rel=1e-12)
        assert f01.loss_combined == pytest.approx(-0.4037172271596514, rel=1e-12)
        assert f01.loss_combined == (f01.loss_sm + f01.loss_dcf) / 2


class TestDistribution:
    def test_mean(self):
        assert distribution_stats([-0.1, -0.2, -0.3]).mean == pytest.approx(-0.2)

    def test_single(self):
        s = distribution_stats([-0.25])
        assert s.mean == s.min == s.max == -0.25
        assert set(s.percentiles.values()) == {-0.25}

    def test_linear_interpolation(self):
        s = distribution_stats([0.0, -1.0])
        assert s.percentiles[25] == pytest.approx(-0.75)
        assert s.percentiles[99] == pytest.approx(-0.01)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            distribution_stats([])

    def test_golden_portfolio(self, demo_pipe):
        s = distribution_stats([r.loss_combined for r in demo_pipe.losses.values()])
        assert s.n == 12
        assert s.mean == pytest.approx(-0.2492386016871844, rel=1e-12)
        assert s.percentiles[1] == pytest.approx(-0.39859136296320974, rel=1e-12)
        assert s.percentiles[50] == pytest.approx(-0.2366391063610277, rel=1e-12)
        assert s.percentiles[99] == pytest.approx(-0.12665271916459403, rel=1e-12)
        assert s.min == pytest.approx(-0.4037172271596514, rel=1e-12)
        assert s.max == pytest.approx(-0.12606526366891527, rel=1e-12)


def _result(firm_id, group, loss, nrs=0.3):
    return LossResult(firm_id, group, nrs, 1.0, 1.0, loss, loss, loss, 0.0, 1.0)


class TestSectorStats:
    def test_one_firm_per_group(self):
        stats = sector_stats([_result("a", "C23", -0.3), _result("b", "A01-03", -0.1)])
        assert [(s.sector_group, s.mean_loss) for s in stats] == [("A01-03", -0.1), ("C23", -0.3)]

    def test_empty_groups_omitted(self):
        assert [s.sector_group for s in sector_stats([_result("a", "D35", -0.2)])] == ["D35"]

    def test_size_weighted_consistency(self, demo_pipe):
        results = list(demo_pipe.losses.values())
        stats = sector_stats(results)
        weighted = math.fsum(s.n_firms * s.mean_loss for s in stats) / len(results)
        assert weighted == pytest.approx(math.fsum(r.loss_combined for r in results) / len(results), rel=1e-13)
        assert sum(s.n_firms for s in stats) == 12
