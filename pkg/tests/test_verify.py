#!/usr/bin/env python3
"""
Tests for the verification suites
"""

import pytest

from shrinkage import estimators, verify
from shrinkage.errors import DimensionTooSmall
from shrinkage.estimators import ShrinkagePolynomial
from shrinkage.ncx2 import DEFAULT_CONTROL
from shrinkage.verify import VerificationReport, VerifyGrid, run_verification

SMALL_GRID = VerifyGrid(
    dims=(14, 18),
    omegas=(0.0, 0.4),
    lambdas=(0.0, 5.0019),
    identity_lambdas=(0.0, 5.0),
    monotone_step=2.0,
    monotone_max=10.0,
    derivative_dims=(14,),
    derivative_lambdas=(2.0,),
    scan_step=0.1,
    mc_points=((14, 10.4311, 0.5),),
    mc_replications=8192,
    rotation_replications=8192,
    consistency_replications=(2_000, 20_000),
    chunk_check_replications=2_000,
)


def failed_sections(report):
    return {r.section for r in report.failures}


@pytest.mark.unit
class TestReport:
    """Test result bookkeeping"""

    def test_status(self):
        report = VerificationReport()
        report.record("s", "passes", "0", 0.0, 1e-12, True)
        report.record("s", "fails", "0", 1.0, 1e-12, False)
        report.record("s", "flagged", "0", 1.0, 1e-12, False, informational=True)
        assert [r.status for r in report.results] == ["PASS", "FAIL", "FLAG"]
        assert len(report.failures) == 1
        assert len(report.flags) == 1
        assert not report.ok

    def test_flags_do_not_fail(self):
        report = VerificationReport()
        report.record("adjudication", "Table 3", "printed", 0.01, 2e-3, False, informational=True)
        assert report.ok

    def test_skip_lines(self):
        report = VerificationReport()
        report.skip("tables", "Table 2 JS cell", "erratum")
        lines = report.lines()
        assert lines[0] == "== tables"
        assert "[SKIP] Table 2 JS cell" in lines[1]
        assert lines[-1] == "1 checks, 0 failed, 0 flagged"

    def test_sections_in_order(self):
        report = VerificationReport()
        for section in ("b", "a", "b"):
            report.record(section, "x", "0", 0.0, 0.0, True)
        assert report.sections() == ["b", "a"]


@pytest.mark.unit
class TestSuites:
    """Test each suite on a small grid"""

    @pytest.mark.parametrize("suite", ["series", "lemma", "derivative", "closed-form", "equivalence",
                                       "minimax", "domination", "optimality", "degeneracy", "tables"])
    def test_suite_passes(self, suite):
        report = run_verification(grid=SMALL_GRID, suites=[suite])
        assert report.results
        assert report.ok, [f"{r.name}: {r.observed}" for r in report.failures]

    def test_monte_carlo_suite(self):
        report = run_verification(grid=SMALL_GRID, suites=["montecarlo"])
        assert report.ok, [f"{r.name}: {r.detail}" for r in report.failures]
        names = [r.name for r in report.results]
        assert "rerun with 4 workers is bit-identical" in names
        assert "rotation invariance JS p=14 lambda=5" in names
        assert "stderr ratio 2000 -> 20000 reps over sqrt(10)" in names
        assert "chunk_size=1 agrees with exact JS p=14 lambda=10.4311" in names
        assert "chunk_size 1 and 4096 draw different samples" in names

    def test_consistency_check(self):
        report = VerificationReport()
        verify.check_mc_consistency(report, SMALL_GRID, DEFAULT_CONTROL)
        (result,) = report.results
        assert result.passed
        assert 1.0 / 1.5 <= result.observed <= 1.5

    def test_chunk_independence_check(self):
        report = VerificationReport()
        verify.check_chunk_independence(report, SMALL_GRID, DEFAULT_CONTROL)
        assert len(report.results) == 3
        assert report.ok, [f"{r.name}: {r.detail}" for r in report.failures]

    def test_erratum_is_skipped(self):
        report = run_verification(grid=SMALL_GRID, suites=["tables"])
        skipped = [r for r in report.results if r.detail.startswith("erratum")]
        assert len(skipped) == 1
        assert "lambda=10.4311 omega=0" in skipped[0].name

    def test_adjudication_is_informational(self):
        report = VerificationReport()
        verify.adjudicate(report, SMALL_GRID, DEFAULT_CONTROL, tables=(1, 3))
        assert report.ok
        assert set(report.adjudication) == {1, 3}
        for scheme, error in report.adjudication.values():
            assert scheme in verify.SCHEMES
            assert error >= 0.0

    def test_degeneracy_tolerance(self):
        report = VerificationReport()
        verify.check_degeneracy(report, SMALL_GRID, DEFAULT_CONTROL, omega=0.999)
        (result,) = report.results
        assert result.tolerance == pytest.approx(1e-3, rel=1e-6)
        assert result.passed


@pytest.mark.unit
class TestBrokenEstimators:
    """Test that the suites catch a wrong estimator"""

    def test_negated_b_fails_domination(self, monkeypatch):
        original = estimators.poly

        def negated_b(degree, p, omega, conv=estimators.CoefficientConvention.THEOREM):
            est = original(degree, p, omega, conv)
            if est.degree < 2:
                return est
            coeffs = list(est.coeffs)
            coeffs[1] = -coeffs[1]
            return ShrinkagePolynomial(est.omega, tuple(coeffs), est.p, est.family, est.convention)

        monkeypatch.setattr(estimators, "poly", negated_b)
        report = run_verification(grid=SMALL_GRID, suites=["domination"])
        assert not report.ok
        assert "domination" in failed_sections(report)
        assert any(r.name.startswith("poly2 <= JS") for r in report.failures)

    def test_suite_error_is_recorded(self, monkeypatch):
        def refuse(degree, p, omega, conv=None):
            raise DimensionTooSmall(degree, p, 99)

        monkeypatch.setattr(estimators, "poly", refuse)
        report = run_verification(grid=SMALL_GRID, suites=["minimax"])
        assert not report.ok
        (failure,) = report.failures
        assert failure.name == "suite raised"
        assert "p > 99" in failure.detail

    def test_unexpected_error_is_recorded(self, monkeypatch):
        def explode(degree, p, omega, conv=None):
            raise ZeroDivisionError("division by zero")

        monkeypatch.setattr(estimators, "poly", explode)
        report = run_verification(grid=SMALL_GRID, suites=["minimax"])
        (failure,) = report.failures
        assert failure.name == "suite raised"
        assert failure.detail == "ZeroDivisionError: division by zero"
