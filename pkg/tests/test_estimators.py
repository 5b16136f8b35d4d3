#!/usr/bin/env python3
"""
Unit tests for polynomial shrinkage estimators
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shrinkage import estimators
from shrinkage.errors import DimensionTooSmall, DomainViolation, LengthMismatch, SingularObservation
from shrinkage.estimators import CoefficientConvention, ShrinkagePolynomial


@pytest.mark.unit
class TestCoefficients:
    """Test the bound-minimizing coefficients and the two conventions"""

    def test_optimal_coefficients(self):
        """a, b, c, d at p=20, omega=0.5"""
        assert estimators.optimal_coefficient(1, 20, 0.5) == pytest.approx(9.0)
        assert estimators.optimal_coefficient(2, 20, 0.5) == pytest.approx(14.0)
        assert estimators.optimal_coefficient(3, 20, 0.5) == pytest.approx(100.0)
        # p^2 - 28p + 188 = 28 at p = 20
        assert estimators.optimal_coefficient(4, 20, 0.5) == pytest.approx(168.0)

    def test_simulation_halves_b_and_c(self):
        for degree in (2, 3):
            theorem = estimators.coefficient(degree, 18, 0.2, CoefficientConvention.THEOREM)
            simulation = estimators.coefficient(degree, 18, 0.2, CoefficientConvention.SIMULATION)
            assert simulation == pytest.approx(theorem / 2.0)

    def test_d_is_convention_free(self):
        theorem = estimators.coefficient(4, 20, 0.1, "theorem")
        simulation = estimators.coefficient(4, 20, 0.1, "simulation")
        assert theorem == simulation

    def test_first_coefficient_is_negative(self):
        """gamma_1 = -a_hat shrinks toward the origin"""
        assert estimators.coefficient(1, 14, 0.0, "theorem") == pytest.approx(-12.0)

    def test_poly_coefficients(self):
        est = estimators.poly(3, 14, 0.0, CoefficientConvention.THEOREM)
        assert est.coeffs == pytest.approx((-12.0, 16.0, 32.0))
        assert est.degree == 3
        assert est.family == "poly3"
        assert est.convention is CoefficientConvention.THEOREM

    def test_poly_simulation_coefficients(self):
        est = estimators.poly(3, 14, 0.0, CoefficientConvention.SIMULATION)
        assert est.coeffs == pytest.approx((-12.0, 8.0, 16.0))

    def test_coefficients_scale_with_one_minus_omega(self):
        base = estimators.poly(4, 20, 0.0)
        scaled = estimators.poly(4, 20, 0.7)
        assert scaled.coeffs == pytest.approx(tuple(0.3 * g for g in base.coeffs))

    def test_convention_parse(self):
        assert CoefficientConvention.parse("SIMULATION") is CoefficientConvention.SIMULATION
        assert CoefficientConvention.parse(" theorem ") is CoefficientConvention.THEOREM
        with pytest.raises(DomainViolation):
            CoefficientConvention.parse("halved")


@pytest.mark.unit
class TestDimensionThresholds:
    """Test p > 2, 6, 10, 14 for degrees 1..4"""

    @pytest.mark.parametrize("degree,threshold", [(1, 2), (2, 6), (3, 10), (4, 14)])
    def test_threshold_is_excluded(self, degree, threshold):
        with pytest.raises(DimensionTooSmall) as exc:
            estimators.by_degree(degree, threshold, 0.0)
        assert exc.value.threshold == threshold
        assert f"p > {threshold}" in str(exc.value)

    @pytest.mark.parametrize("degree,threshold", [(1, 2), (2, 6), (3, 10), (4, 14)])
    def test_first_admissible_dimension(self, degree, threshold):
        est = estimators.by_degree(degree, threshold + 1, 0.0)
        assert est.degree == degree

    def test_degree_out_of_range(self):
        with pytest.raises(DomainViolation):
            estimators.poly(5, 30, 0.0)

    def test_omega_range(self):
        with pytest.raises(DomainViolation):
            estimators.james_stein(10, 1.0)
        with pytest.raises(DomainViolation):
            estimators.poly(2, 10, -0.1)

    def test_mle_by_degree(self):
        est = estimators.by_degree(0, 3, 0.4)
        assert est.coeffs == ()
        assert est.family == "MLE"


@pytest.mark.unit
class TestDominationInterval:
    """Test the open coefficient intervals and their midpoints"""

    @pytest.mark.parametrize("degree", [1, 2, 3])
    def test_optimal_is_midpoint(self, degree):
        low, high = estimators.domination_interval(degree, 18, 0.3)
        assert low == 0.0
        assert (low + high) / 2.0 == pytest.approx(estimators.optimal_coefficient(degree, 18, 0.3))

    def test_no_interval_for_degree_four(self):
        with pytest.raises(DomainViolation):
            estimators.domination_interval(4, 20, 0.0)


@pytest.mark.unit
class TestEstimate:
    """Test applying estimators to observations"""

    def test_mle_is_identity(self):
        x = np.array([1.0, -2.0, 3.0])
        assert np.array_equal(estimators.estimate(estimators.mle(3), x), x)

    def test_james_stein_factor(self):
        """p=4, omega=0: factor 1 - 2 / ||x||^2"""
        est = estimators.james_stein(4, 0.0)
        x = np.array([1.0, 1.0, 1.0, 1.0])
        assert estimators.estimate(est, x) == pytest.approx(0.5 * x)

    def test_no_positive_part(self):
        """Small ||x||^2 gives a negative factor, applied as is"""
        est = estimators.james_stein(4, 0.0)
        x = np.array([0.5, 0.0, 0.0, 0.0])
        assert estimators.estimate(est, x) == pytest.approx(np.array([0.5 * (1 - 2 / 0.25), 0.0, 0.0, 0.0]))

    def test_batch_rows(self):
        est = estimators.poly(2, 8, 0.1)
        rows = np.arange(1.0, 17.0).reshape(2, 8)
        batch = estimators.estimate(est, rows)
        for i in range(2):
            assert batch[i] == pytest.approx(estimators.estimate(est, rows[i]))

    def test_factor_matches_polynomial(self):
        est = ShrinkagePolynomial(0.0, (-2.0, 3.0, -1.0))
        u = 4.0
        assert est.factor(u) == pytest.approx(1 - 2 / 4 + 3 / 16 - 1 / 64)

    def test_zero_observation(self):
        with pytest.raises(SingularObservation):
            estimators.estimate(estimators.james_stein(5, 0.0), np.zeros(5))

    def test_zero_observation_is_fine_for_mle(self):
        assert np.array_equal(estimators.estimate(estimators.mle(5), np.zeros(5)), np.zeros(5))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            estimators.estimate(estimators.james_stein(5, 0.0), np.ones(6))


@pytest.mark.unit
class TestShrinkagePolynomial:
    """Test the estimator value type"""

    def test_rejects_non_finite_coefficient(self):
        with pytest.raises(DomainViolation):
            ShrinkagePolynomial(0.0, (float("nan"),))

    def test_truncated_keeps_lower_terms(self):
        est = estimators.poly(4, 20, 0.1)
        lower = est.truncated(2)
        assert lower.coeffs == est.coeffs[:2]
        assert lower.family == "poly2"
        assert est.truncated(1).family == "JS"
        assert est.truncated(1).convention is None

    @pytest.mark.parametrize("conv", list(CoefficientConvention))
    @pytest.mark.parametrize("p", [15, 18, 24])
    def test_degrees_nest(self, p, conv):
        """poly(d) cut to d - 1 coefficients is poly(d - 1) with the same convention"""
        for degree in (4, 3, 2):
            assert estimators.poly(degree, p, 0.3, conv).truncated(degree - 1) == estimators.by_degree(degree - 1, p, 0.3, conv)

    def test_degree_one_is_james_stein(self):
        x = np.linspace(-2.0, 3.0, 12)
        for omega in (0.0, 0.25, 0.9):
            js = estimators.james_stein(12, omega)
            assert estimators.poly(1, 12, omega) == js
            assert np.array_equal(estimators.estimate(estimators.poly(1, 12, omega), x), estimators.estimate(js, x))

    def test_truncated_bounds(self):
        with pytest.raises(DomainViolation):
            estimators.poly(2, 10, 0.0).truncated(3)

    def test_family_labels(self):
        assert [estimators.family_label(d) for d in range(5)] == ["MLE", "JS", "poly2", "poly3", "poly4"]

    def test_first_order_is_free_constant(self):
        est = estimators.first_order(3.5, 10, 0.2)
        assert est.coeffs == (-3.5,)
        assert est.family == "first_order"


@pytest.mark.unit
class TestEquivariance:
    """Test that estimates rotate with the observation"""

    @settings(max_examples=60, deadline=None)
    @given(
        degree=st.integers(min_value=1, max_value=4),
        p=st.integers(min_value=15, max_value=40),
        omega=st.floats(min_value=0.0, max_value=0.95),
        conv=st.sampled_from(list(CoefficientConvention)),
        seed=st.integers(min_value=0, max_value=2 ** 32 - 1),
    )
    def test_orthogonal_equivariance(self, degree, p, omega, conv, seed):
        rng = np.random.default_rng(seed)
        q, r = np.linalg.qr(rng.standard_normal((p, p)))
        q = q * np.sign(np.diag(r))
        x = 3.0 * rng.standard_normal(p) + 1.0
        est = estimators.poly(degree, p, omega, conv)
        rotated = estimators.estimate(est, q @ x)
        expected = q @ estimators.estimate(est, x)
        np.testing.assert_allclose(rotated, expected, rtol=1e-12, atol=1e-12 * np.linalg.norm(x))
