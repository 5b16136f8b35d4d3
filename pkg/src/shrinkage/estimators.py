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
Polynomial shrinkage estimators of a multivariate normal mean.

Every estimator handled here has the form

    delta(x) = x + sum_{m=1..M} gamma_m * (1 / ||x||^2)^m * x

so it is fully described by its coefficient tuple (gamma_1, ..., gamma_M).
M = 0 is the MLE delta(x) = x; M = 1 with gamma_1 = -(1-omega)(p-2) is the
James-Stein estimator; M = 2, 3, 4 add the b, c, d terms:

    delta_b(2) = delta_JS + b (1/||x||^2)^2 x
    delta_c(3) = delta_b(2) + c (1/||x||^2)^3 x        (built on b-hat)
    delta_d(4) = delta_c(3) + d (1/||x||^2)^4 x        (built on c-hat)

Two coefficient conventions exist for b and c. THEOREM uses the values that
minimize the domination bounds; SIMULATION uses the halved values of the
simulation study. d is the same under both.

No positive-part clamping is applied: for small ||x||^2 the factor may be
negative, and it is evaluated as written.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .errors import DimensionTooSmall, DomainViolation, LengthMismatch, SingularObservation


class CoefficientConvention(Enum):
    """Which published values to use for the b and c coefficients."""
    THEOREM = "theorem"
    SIMULATION = "simulation"

    @classmethod
    def parse(cls, value):
        """Accept an enum member or a case-insensitive name ("theorem", "SIMULATION")."""
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        for member in cls:
            if member.value == text:
                return member
        raise DomainViolation(f"Unknown coefficient convention {value!r} (expected THEOREM or SIMULATION)")


# p must exceed these for the family's coefficients (and risk) to be defined
DEGREE_THRESHOLDS = {1: 2, 2: 6, 3: 10, 4: 14}

FAMILY_MLE = "MLE"
FAMILY_JS = "JS"
FAMILY_FIRST_ORDER = "first_order"
FAMILY_CUSTOM = "custom"


def family_label(degree):
    """Short label used in reports and CSV headers: MLE, JS, poly2, poly3, poly4."""
    if degree == 0:
        return FAMILY_MLE
    if degree == 1:
        return FAMILY_JS
    return f"poly{degree}"


@dataclass(frozen=True)
class ShrinkagePolynomial:
    """
    delta(x) = (1 + sum_m gamma_m ||x||^(-2m)) x.

    Attributes:
        omega: Balanced-loss weight the coefficients were tuned for, in [0, 1)
        coeffs: (gamma_1, ..., gamma_M); empty for the MLE
        p: Dimension the coefficients were tuned for (None if dimension-free)
        family: Report label (MLE, JS, poly2..poly4, first_order, custom)
        convention: Coefficient convention for poly families, else None
    """
    omega: float = 0.0
    coeffs: Tuple[float, ...] = field(default_factory=tuple)
    p: Optional[int] = None
    family: str = FAMILY_CUSTOM
    convention: Optional[CoefficientConvention] = None

    def __post_init__(self):
        _check_omega(self.omega)
        coeffs = tuple(float(g) for g in self.coeffs)
        for m, g in enumerate(coeffs, start=1):
            if not math.isfinite(g):
                raise DomainViolation(f"Coefficient gamma_{m} must be finite, got {g!r}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "omega", float(self.omega))
        if self.p is not None:
            if isinstance(self.p, bool) or not float(self.p).is_integer() or self.p < 1:
                raise DomainViolation(f"Dimension must be an integer >= 1, got {self.p!r}")
            object.__setattr__(self, "p", int(self.p))

    @property
    def degree(self):
        return len(self.coeffs)

    def factor(self, u):
        """
        Shrinkage factor 1 + sum_m gamma_m u^(-m) at squared norm(s) u.

        Args:
            u: float or numpy array of squared norms (> 0 when degree >= 1)

        Returns:
            Same shape as u
        """
        u = np.asarray(u, dtype=float)
        out = np.ones_like(u)
        for m, g in enumerate(self.coeffs, start=1):
            out = out + g * u ** (-m)
        return out

    def truncated(self, degree):
        """The estimator keeping only gamma_1..gamma_degree."""
        if degree < 0 or degree > self.degree:
            raise DomainViolation(f"Cannot truncate a degree {self.degree} estimator to degree {degree}")
        family = family_label(degree) if self.family.startswith("poly") or self.family in (FAMILY_JS, FAMILY_MLE) else self.family
        return ShrinkagePolynomial(self.omega, self.coeffs[:degree], self.p, family, self.convention if degree >= 2 else None)

    def __repr__(self):
        coeffs = ", ".join(f"{g:g}" for g in self.coeffs)
        conv = f", {self.convention.name}" if self.convention else ""
        return f"ShrinkagePolynomial({self.family}, p={self.p}, omega={self.omega:g}, coeffs=({coeffs}){conv})"


def _check_omega(omega):
    if not (0.0 <= omega < 1.0):
        raise DomainViolation(f"omega must lie in [0, 1), got {omega!r}")


def _check_dimension(degree, p):
    threshold = DEGREE_THRESHOLDS[degree]
    if p <= threshold:
        raise DimensionTooSmall(degree, p, threshold)


# ============================================================================
# Constructors
# ============================================================================

def mle(p=None, omega=0.0):
    """The MLE delta_0(x) = x (no shrinkage terms)."""
    return ShrinkagePolynomial(omega, (), p, FAMILY_MLE)


def first_order(a, p, omega):
    """
    delta_a(1) = (1 - a / ||x||^2) x for a free constant a.

    Raises:
        DimensionTooSmall: If p < 3
    """
    _check_omega(omega)
    _check_dimension(1, p)
    return ShrinkagePolynomial(omega, (-float(a),), p, FAMILY_FIRST_ORDER)


def james_stein(p, omega):
    """
    James-Stein estimator (1 - a_hat / ||x||^2) x with a_hat = (1 - omega)(p - 2).

    Raises:
        DimensionTooSmall: If p < 3
    """
    _check_omega(omega)
    _check_dimension(1, p)
    return ShrinkagePolynomial(omega, (-optimal_coefficient(1, p, omega),), p, FAMILY_JS)


def optimal_coefficient(degree, p, omega):
    """
    Bound-minimizing coefficient magnitude for each family.

        degree 1: a_hat = (1-omega)(p-2)
        degree 2: b_hat = 2(1-omega)(p-6)
        degree 3: c_hat = 2(1-omega)(p-10)^2
        degree 4: d_hat = 2(1-omega)(p^2 - 28p + 188)(p-14)
    """
    w = 1.0 - omega
    if degree == 1:
        return w * (p - 2)
    if degree == 2:
        return 2.0 * w * (p - 6)
    if degree == 3:
        return 2.0 * w * (p - 10) ** 2
    if degree == 4:
        return 2.0 * w * (p * p - 28 * p + 188) * (p - 14)
    raise DomainViolation(f"No optimal coefficient for degree {degree} (expected 1..4)")


def coefficient(degree, p, omega, conv):
    """
    Signed gamma_degree under a convention.

    gamma_1 = -a_hat always. SIMULATION halves b and c; d is unchanged.
    """
    conv = CoefficientConvention.parse(conv)
    if degree == 1:
        return -optimal_coefficient(1, p, omega)
    value = optimal_coefficient(degree, p, omega)
    if conv is CoefficientConvention.SIMULATION and degree in (2, 3):
        value /= 2.0
    return value


def poly(degree, p, omega, conv=CoefficientConvention.THEOREM):
    """
    Polynomial shrinkage estimator of the given degree.

    Args:
        degree: 1 (James-Stein), 2, 3 or 4
        p: Dimension; must exceed 2 / 6 / 10 / 14 for degree 1 / 2 / 3 / 4
        omega: Balanced-loss weight in [0, 1)
        conv: CoefficientConvention (or its name)

    Raises:
        DimensionTooSmall: With the violated threshold named
    """
    if degree not in DEGREE_THRESHOLDS:
        raise DomainViolation(f"Polynomial degree must be 1..4, got {degree!r}")
    _check_omega(omega)
    conv = CoefficientConvention.parse(conv)
    _check_dimension(degree, p)
    coeffs = tuple(coefficient(m, p, omega, conv) for m in range(1, degree + 1))
    return ShrinkagePolynomial(omega, coeffs, p, family_label(degree), conv if degree >= 2 else None)


def by_degree(degree, p, omega, conv=CoefficientConvention.THEOREM):
    """MLE for degree 0, James-Stein for 1, poly() above."""
    if degree == 0:
        _check_omega(omega)
        return mle(p, omega)
    if degree == 1:
        return james_stein(p, omega)
    return poly(degree, p, omega, conv)


def domination_interval(degree, p, omega):
    """
    Open interval of the free coefficient for which the risk bound proves
    improvement over the next-lower family.

        degree 1: a in (0, 2(1-omega)(p-2))       dominates the MLE
        degree 2: b in (0, 4(1-omega)(p-6))       dominates James-Stein
        degree 3: c in (0, 4(1-omega)(p-10)^2)    dominates delta_b_hat(2)

    The optimal coefficient is the midpoint.

    Returns:
        tuple (low, high)
    """
    if degree not in (1, 2, 3):
        raise DomainViolation(f"Domination interval is derived for degrees 1..3, got {degree!r}")
    _check_omega(omega)
    _check_dimension(degree, p)
    return (0.0, 2.0 * optimal_coefficient(degree, p, omega))


# ============================================================================
# Evaluation
# ============================================================================

def estimate(est: ShrinkagePolynomial, x):
    """
    Apply the estimator to one observation or a batch of observations.

    Args:
        est: ShrinkagePolynomial
        x: Array of shape (p,) or (n, p)

    Returns:
        numpy array of the same shape as x

    Raises:
        SingularObservation: If est has shrinkage terms and some ||x||^2 == 0
        LengthMismatch: If the last dimension differs from est.p
    """
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2):
        raise DomainViolation(f"Observations must be a vector or a matrix of rows, got shape {x.shape}")
    if est.p is not None and x.shape[-1] != est.p:
        raise LengthMismatch(f"Estimator tuned for p={est.p} applied to a vector of length {x.shape[-1]}")

    if est.degree == 0:
        return x.copy()

    u = np.einsum("...i,...i->...", x, x)
    if np.any(u == 0.0):
        raise SingularObservation(f"Shrinkage factor undefined at ||x||^2 = 0 ({est.family})")

    return est.factor(u)[..., np.newaxis] * x
