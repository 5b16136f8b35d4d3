# MIT License
#
# Copyright (c) 2025 Balanced Shrinkage Contributors
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in
# all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.


"""
Balanced-loss risk of polynomial shrinkage estimators.

The balanced squared error loss with target delta_0 = X (the MLE) is

    L_omega(delta, theta) = omega ||delta - X||^2 + (1 - omega) ||delta - theta||^2

For delta(X) = X + sum_m gamma_m U^(-m) X with U = ||X||^2, Stein's identity
gives the risk as a finite combination of inverse moments of U:

    R = (1-omega) p
        + sum_{j,k} gamma_j gamma_k E[U^(1-j-k)]
        + 2 (1-omega) sum_m gamma_m (p - 2m) E[U^(-m)]

exact_risk_general evaluates this for any coefficients. The chained
formulas (JS -> degree 2 -> degree 3 -> degree 4) are kept as an
independent check; the degree 3 and 4 chains substitute b_hat and c_hat
into their cross terms, so they only hold under the THEOREM convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from . import estimators
from .errors import ConventionUnsupported, DimensionTooSmall, DomainViolation, LengthMismatch, NonIntegrable
from .estimators import CoefficientConvention, ShrinkagePolynomial
from .log import log, LOG_DEBUG
from .ncx2 import DEFAULT_CONTROL, NoncentralChiSquare, SeriesControl, inverse_moments


class RiskMethod(Enum):
    """How a risk value was obtained."""
    EXACT_GENERAL = "exact_general"
    EXACT_CHAINED = "exact_chained"
    CHAINED_PLUGIN = "chained_plugin"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class BalancedLoss:
    """Balanced squared error loss with weight omega in [0, 1) on fidelity to the MLE."""
    omega: float

    def __post_init__(self):
        if not (0.0 <= self.omega < 1.0):
            raise DomainViolation(f"omega must lie in [0, 1), got {self.omega!r}")


@dataclass(frozen=True)
class RiskReport:
    """
    Risk of one estimator at one (p, lambda, omega) point.

    Attributes:
        risk: R_omega(delta, theta)
        ratio_to_mle: risk / ((1 - omega) p)
        method: RiskMethod that produced the value
        p, lam, omega: Evaluation point
        coeffs: Estimator coefficients (gamma_1, ...)
        family: Estimator label (MLE, JS, poly2, ...)
        convention: Coefficient convention, if any
        stderr: Standard error (Monte Carlo only)
        replications: Replication count (Monte Carlo only)
    """
    risk: float
    ratio_to_mle: float
    method: RiskMethod
    p: int
    lam: float
    omega: float
    coeffs: Tuple[float, ...] = field(default_factory=tuple)
    family: str = estimators.FAMILY_CUSTOM
    convention: Optional[CoefficientConvention] = None
    stderr: Optional[float] = None
    replications: Optional[int] = None


def make_report(risk, method, p, lam, omega, coeffs=(), family=estimators.FAMILY_CUSTOM,
                convention=None, stderr=None, replications=None):
    """Build a RiskReport, deriving ratio_to_mle from the MLE risk."""
    return RiskReport(
        risk=float(risk),
        ratio_to_mle=float(risk) / mle_risk(p, omega),
        method=method,
        p=int(p),
        lam=float(lam),
        omega=float(omega),
        coeffs=tuple(coeffs),
        family=family,
        convention=convention,
        stderr=stderr,
        replications=replications,
    )


# ============================================================================
# Loss
# ============================================================================

def balanced_loss(loss: BalancedLoss, delta, x, theta):
    """
    omega ||delta - x||^2 + (1 - omega) ||delta - theta||^2.

    Accepts single vectors or row batches (delta and x of shape (n, p),
    theta of shape (p,) or (n, p)); returns a float or an array of n losses.

    Raises:
        LengthMismatch: If the vectors do not share a dimension
    """
    delta = np.asarray(delta, dtype=float)
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)

    if delta.shape != x.shape or theta.shape[-1:] != x.shape[-1:] or theta.ndim > x.ndim:
        raise LengthMismatch(
            f"balanced_loss needs equal-length vectors (delta {delta.shape}, x {x.shape}, theta {theta.shape})"
        )

    fidelity = delta - x
    precision = delta - theta
    value = (loss.omega * np.einsum("...i,...i->...", fidelity, fidelity)
             + (1.0 - loss.omega) * np.einsum("...i,...i->...", precision, precision))
    if value.ndim == 0:
        return float(value)
    return value


def mle_risk(p, omega):
    """Risk of the MLE under the balanced loss: (1 - omega) p."""
    if p < 1:
        raise DomainViolation(f"p must be >= 1, got {p}")
    if not (0.0 <= omega < 1.0):
        raise DomainViolation(f"omega must lie in [0, 1), got {omega!r}")
    return (1.0 - omega) * p


# ============================================================================
# Exact risk
# ============================================================================

def exact_risk_general(est: ShrinkagePolynomial, p: int, lam: float,
                       ctrl: SeriesControl = DEFAULT_CONTROL, omega: Optional[float] = None) -> RiskReport:
    """
    Exact risk of any polynomial shrinkage estimator via the Stein-identity form.

    Args:
        est: Estimator (evaluated under its own omega unless omega is given)
        p: Dimension
        lam: Noncentrality ||theta||^2
        ctrl: Series truncation policy
        omega: Loss weight override

    Raises:
        NonIntegrable: If p <= 4M - 2, naming E[U^(1-2M)]
        LengthMismatch: If est was tuned for a different dimension
    """
    omega = est.omega if omega is None else omega
    BalancedLoss(omega)
    if est.p is not None and est.p != p:
        raise LengthMismatch(f"Estimator tuned for p={est.p} evaluated at p={p}")

    dist = NoncentralChiSquare(p, lam)
    M = est.degree
    base = mle_risk(p, omega)

    if M == 0:
        return make_report(base, RiskMethod.EXACT_GENERAL, p, lam, omega, (), est.family, est.convention)

    if p <= 4 * M - 2:
        raise NonIntegrable(p, 1 - 2 * M, f"exact_risk_general (degree {M})")

    # inv[m - 1] = E[U^-m], m = 1 .. 2M - 1
    inv = inverse_moments(dist, 2 * M - 1, ctrl)
    gamma = est.coeffs

    quadratic = math.fsum(gamma[j] * gamma[k] * inv[j + k]
                          for j in range(M) for k in range(M))
    cross = 2.0 * (1.0 - omega) * math.fsum(gamma[m - 1] * (p - 2 * m) * inv[m - 1]
                                            for m in range(1, M + 1))
    risk = base + quadratic + cross

    log(f"Risk: general {est.family} p={p} lambda={lam:g} omega={omega:g} -> {risk:.10g}", LOG_DEBUG)
    return make_report(risk, RiskMethod.EXACT_GENERAL, p, lam, omega, gamma, est.family, est.convention)


def exact_risk_js(p: int, omega: float, lam: float, ctrl: SeriesControl = DEFAULT_CONTROL) -> RiskReport:
    """
    James-Stein risk (1-omega) p - (p-2)^2 (1-omega)^2 E[1 / (p - 2 + 2K)], K ~ Poisson(lambda/2).
    """
    BalancedLoss(omega)
    if p <= estimators.DEGREE_THRESHOLDS[1]:
        raise DimensionTooSmall(1, p, estimators.DEGREE_THRESHOLDS[1])
    inv1 = inverse_moments(NoncentralChiSquare(p, lam), 1, ctrl)[0]
    risk = _js_risk(p, omega, inv1)
    a_hat = estimators.optimal_coefficient(1, p, omega)
    return make_report(risk, RiskMethod.EXACT_CHAINED, p, lam, omega, (-a_hat,), estimators.FAMILY_JS)


def exact_risk_first_order(a: float, p: int, omega: float, lam: float,
                           ctrl: SeriesControl = DEFAULT_CONTROL) -> RiskReport:
    """
    Risk of delta_a(1): (1-omega)[p - 2a(p-2) E(U^-1)] + a^2 E(U^-1).
    """
    BalancedLoss(omega)
    if p <= estimators.DEGREE_THRESHOLDS[1]:
        raise DimensionTooSmall(1, p, estimators.DEGREE_THRESHOLDS[1])
    inv1 = inverse_moments(NoncentralChiSquare(p, lam), 1, ctrl)[0]
    risk = (1.0 - omega) * (p - 2.0 * a * (p - 2) * inv1) + a * a * inv1
    return make_report(risk, RiskMethod.EXACT_CHAINED, p, lam, omega, (-float(a),), estimators.FAMILY_FIRST_ORDER)


def _js_risk(p, omega, inv1):
    w = 1.0 - omega
    return w * p - (p - 2) ** 2 * w * w * inv1


def _chained_risk(degree, p, omega, coeffs, inv):
    """
    Chained risk formulas with the coefficient constants as given.

    inv[m - 1] = E[U^-m] = E(1 / ||X||^(2m)).
    """
    w = 1.0 - omega
    risk = _js_risk(p, omega, inv[0])
    if degree >= 2:
        b = coeffs[1]
        risk += -4.0 * b * w * inv[1] + b * b * inv[2]
    if degree >= 3:
        c = coeffs[2]
        risk += c * c * inv[4] + 4.0 * c * w * (p - 6) * inv[3] - 8.0 * c * w * inv[2]
    if degree >= 4:
        d = coeffs[3]
        risk += (d * d * inv[6] + 4.0 * d * w * (p - 10) ** 2 * inv[5]
                 + 4.0 * d * w * (p - 6) * inv[4] - 12.0 * d * w * inv[3])
    return risk


def exact_risk_chained(degree: int, p: int, omega: float, lam: float,
                       conv=CoefficientConvention.THEOREM, ctrl: SeriesControl = DEFAULT_CONTROL,
                       plugin: bool = False) -> RiskReport:
    """
    Risk of poly(degree, p, omega, conv) via the chained proposition formulas.

    Args:
        degree: 2, 3 or 4 (1 is accepted and gives the James-Stein risk)
        conv: CoefficientConvention. The degree 3 and 4 chains are only valid
              for THEOREM coefficients; degree 2 accepts either.
        plugin: Evaluate the chain with SIMULATION constants substituted
                anyway (a diagnostic, not a risk)

    Raises:
        ConventionUnsupported: SIMULATION at degree >= 3 without plugin
        DimensionTooSmall: Below the degree's threshold
    """
    conv = CoefficientConvention.parse(conv)
    est = estimators.poly(degree, p, omega, conv)

    method = RiskMethod.EXACT_CHAINED
    if conv is CoefficientConvention.SIMULATION and degree >= 3:
        if not plugin:
            raise ConventionUnsupported(
                f"Chained risk for degree {degree} assumes THEOREM lower-order coefficients; "
                f"use exact_risk_general for the SIMULATION convention"
            )
        method = RiskMethod.CHAINED_PLUGIN

    inv = inverse_moments(NoncentralChiSquare(p, lam), 2 * degree - 1, ctrl)
    risk = _chained_risk(degree, p, omega, est.coeffs, inv)
    return make_report(risk, method, p, lam, omega, est.coeffs, est.family, est.convention)


def risk_ratio(report: RiskReport) -> float:
    """Risk relative to the MLE, risk / ((1 - omega) p)."""
    return report.risk / mle_risk(report.p, report.omega)


# ============================================================================
# Domination bounds
# ============================================================================

def risk_upper_bound(degree: int, coefficient: float, p: int, omega: float, lam: float,
                     ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """
    Upper bound on the risk obtained by replacing moment ratios with their suprema.

        degree 2 (b): R(JS) - 4b(1-omega) E(U^-2) + b^2 / (p-6) E(U^-2)
        degree 3 (c): R(delta_b_hat) + c^2 / ((p-8)(p-10)) E(U^-3)
                      - 4c(1-omega)(p-10)/(p-8) E(U^-3)

    The degree 3 bound holds for c > 0. The bound is minimized at the optimal
    coefficient and lies below the lower family's risk on domination_interval.
    """
    BalancedLoss(omega)
    if degree not in (2, 3):
        raise DomainViolation(f"Risk bounds are derived for degrees 2 and 3, got {degree!r}")
    threshold = estimators.DEGREE_THRESHOLDS[degree]
    if p <= threshold:
        raise DimensionTooSmall(degree, p, threshold)

    w = 1.0 - omega
    inv = inverse_moments(NoncentralChiSquare(p, lam), 3, ctrl)
    js = _js_risk(p, omega, inv[0])

    if degree == 2:
        b = coefficient
        return js - 4.0 * b * w * inv[1] + b * b / (p - 6) * inv[1]

    b_hat = estimators.optimal_coefficient(2, p, omega)
    lower = js - 4.0 * b_hat * w * inv[1] + b_hat * b_hat * inv[2]
    c = coefficient
    return lower + c * c / ((p - 8) * (p - 10)) * inv[2] - 4.0 * c * w * (p - 10) / (p - 8) * inv[2]
