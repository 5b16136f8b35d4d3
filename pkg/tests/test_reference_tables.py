#!/usr/bin/env python3
"""
Tests reproducing the published risk-ratio tables
"""

import pytest

from shrinkage import reference
from shrinkage.errors import DomainViolation
from shrinkage.risk import exact_risk_js


def js_cells(number):
    tab = reference.table(number)
    return [(number, tab.p, lam, omega) for (lam, omega) in sorted(tab.cells)]


@pytest.mark.unit
class TestPublishedTables:
    """Test the stored table values"""

    def test_every_cell_present(self):
        for number, tab in reference.TABLES.items():
            assert len(tab.cells) == len(reference.LAMBDAS) * len(reference.OMEGAS)
            for entries in tab.cells.values():
                assert len(entries) == len(tab.degrees)

    def test_dimensions(self):
        assert [reference.table(n).p for n in (1, 2, 3, 4)] == [14, 18, 20, 24]

    def test_entry_order(self):
        assert reference.table(1).degrees == (1, 2, 3)
        assert reference.table(4).degrees == (3, 4)

    def test_five_digit_entry_kept(self):
        assert reference.table(1).value(5.0019, 0.0, 3) == 0.36309

    def test_unknown_table(self):
        with pytest.raises(DomainViolation):
            reference.table(5)
        with pytest.raises(DomainViolation):
            reference.table("two")

    def test_figure_presets(self):
        preset = reference.figure(6)
        assert (preset.p, preset.omega, preset.degrees) == (14, 0.4, (2, 3))
        with pytest.raises(DomainViolation):
            reference.figure(9)

    def test_ratios_increase_with_omega(self):
        """Every printed row moves toward 1 as omega grows"""
        for tab in reference.TABLES.values():
            for lam in reference.LAMBDAS:
                for index in range(len(tab.degrees)):
                    row = [tab.cells[(lam, omega)][index] for omega in reference.OMEGAS]
                    assert row == sorted(row)


@pytest.mark.unit
class TestJamesSteinColumns:
    """Test computed James-Stein ratios against the printed columns"""

    @pytest.mark.parametrize("number,p,lam,omega", js_cells(1) + js_cells(2))
    def test_js_cell(self, number, p, lam, omega):
        if reference.is_erratum(number, lam, omega, 1):
            pytest.skip(reference.ERRATA[(number, lam, omega, 1)])
        printed = reference.table(number).value(lam, omega, 1)
        computed = exact_risk_js(p, omega, lam).ratio_to_mle
        assert computed == pytest.approx(printed, abs=reference.JS_TOLERANCE[number])

    def test_erratum_cell(self):
        """Table 2, lambda=10.4311, omega=0 breaks its row"""
        assert reference.is_erratum(2, 10.4311, 0.0, 1)
        printed = reference.table(2).value(10.4311, 0.0, 1)
        computed = exact_risk_js(18, 0.0, 10.4311).ratio_to_mle
        assert computed == pytest.approx(0.4456, abs=2e-3)
        assert abs(computed - printed) > reference.JS_TOLERANCE[2]

    def test_erratum_row_consistency(self):
        """(1 - ratio) / (1 - omega) is constant along a row except at the erratum"""
        tab = reference.table(2)
        shares = [(1.0 - tab.value(10.4311, omega, 1)) / (1.0 - omega) for omega in reference.OMEGAS[1:]]
        assert max(shares) - min(shares) < 1e-3
        first = 1.0 - tab.value(10.4311, 0.0, 1)
        assert abs(first - shares[0]) > 5e-3

    def test_only_one_erratum(self):
        assert list(reference.ERRATA) == [(2, 10.4311, 0.0, 1)]
