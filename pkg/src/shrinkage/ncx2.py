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
Non-central chi-square moments via the Poisson mixture representation.

If X ~ N_p(theta, I_p) then U = ||X||^2 follows a non-central chi-square
with p degrees of freedom and noncentrality lambda = ||theta||^2. U is a
Poisson mixture of central chi-squares:

    U | K ~ chi2_{p+2K},   K ~ Poisson(lambda / 2)

so every moment is a Poisson-weighted series over central moments:

    E[U^v] = sum_k P(K=k) * 2^v * Gamma(p/2 + k + v) / Gamma(p/2 + k)

This module evaluates such series (moments, inverse moments, moment ratios,
lambda-derivatives) with an explicit truncation policy.

Series Truncation:
    Terms are summed from k = 0 over a window reaching well past the Poisson
    mode, max(lambda, 20) + 40*sqrt(max(lambda, 1)) terms. The series then
    stops once the geometric tail bound of the first omitted term falls below
    rel_tol * |partial sum|; otherwise the window doubles, up to max_terms.
    lambda = 0 is the single k = 0 term.

Gamma Ratios:
    Every term is assembled in log space: log Poisson weight plus the log of
    the central moment. Integer exponents use sums of logs of the exact
    finite products; non-integer exponents use log-gamma differences. A
    series whose value exceeds the float range raises OverflowError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import DomainViolation, NonIntegrable, TruncationFailure
from .log import log, LOG_DEBUG, LOG_EXTREME


@dataclass(frozen=True)
class NoncentralChiSquare:
    """
    Distribution of U = ||X||^2 for X ~ N_p(theta, I_p).

    Attributes:
        p: Degrees of freedom (integer >= 1)
        lam: Noncentrality lambda = ||theta||^2 (>= 0); mixing K ~ Poisson(lam / 2)
    """
    p: int
    lam: float = 0.0

    def __post_init__(self):
        if isinstance(self.p, bool) or not float(self.p).is_integer():
            raise DomainViolation(f"Degrees of freedom must be an integer, got {self.p!r}")
        if self.p < 1:
            raise DomainViolation(f"Degrees of freedom must be >= 1, got {self.p}")
        if not math.isfinite(self.lam) or self.lam < 0:
            raise DomainViolation(f"Noncentrality must be finite and >= 0, got {self.lam!r}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def mixing_mean(self):
        """Mean of the Poisson mixing index K."""
        return self.lam / 2.0

    def mean(self):
        return self.p + self.lam


@dataclass(frozen=True)
class SeriesControl:
    """
    Truncation policy for Poisson-mixture series.

    Attributes:
        rel_tol: Stop once the tail bound is below rel_tol * |partial sum|
        max_terms: Hard cap on the number of Poisson terms
    """
    rel_tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise DomainViolation(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")
        if isinstance(self.max_terms, bool) or int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainViolation(f"max_terms must be an integer >= 1, got {self.max_terms!r}")


DEFAULT_CONTROL = SeriesControl()

_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


# ============================================================================
# Series machinery
# ============================================================================

def _window(lam):
    """Minimum number of Poisson terms summed before the tail test applies."""
    return int(math.ceil(max(lam, 20.0) + 40.0 * math.sqrt(max(lam, 1.0)))) + 1


def _tail_bound(first_omitted, second_omitted):
    """
    Geometric bound on the magnitude of an omitted series tail.

    Past the Poisson mode the term ratio t_{k+1}/t_k is nonincreasing for all
    kernels used here, so the tail is at most t_n / (1 - rho).
    """
    t0 = np.abs(first_omitted)
    t1 = np.abs(second_omitted)
    bound = np.zeros_like(t0)
    nonzero = t0 > 0
    rho = np.divide(t1, t0, out=np.zeros_like(t0), where=nonzero)
    converging = nonzero & (rho < 1.0)
    bound[converging] = t0[converging] / (1.0 - rho[converging])
    bound[nonzero & ~converging] = np.inf
    return bound


def _poisson_series(dist, log_kernel, ctrl, label, sign=1.0):
    """
    Evaluate sum_k P(K=k) * kernel(k) for K ~ Poisson(dist.lam / 2).

    Each term is formed as exp(log P(K=k) + log|kernel(k)| - row max), so
    neither factor is exponentiated on its own; the row max is restored
    once the sum is taken.

    Args:
        dist: NoncentralChiSquare
        log_kernel: Maps a float array of k values to log|kernel(k)| as an
                    array of the same length, or a (rows, len(k)) array for
                    several series sharing the same Poisson weights
        ctrl: SeriesControl
        label: Short description for log messages and errors
        sign: Common sign of every kernel value

    Returns:
        numpy array of series values, one per kernel row

    Raises:
        OverflowError: If a series value exceeds the float range
    """
    mu = dist.mixing_mean

    if mu == 0.0:
        # Degenerate Poisson: all mass on k = 0
        log_totals = np.atleast_2d(log_kernel(np.zeros(1)))[:, 0].astype(float)
        return _restore(sign, np.ones_like(log_totals), log_totals, label)

    n = min(_window(dist.lam), ctrl.max_terms)

    while True:
        # Two look-ahead terms feed the tail bound
        k = np.arange(n + 2, dtype=float)
        log_terms = np.atleast_2d(log_kernel(k)) + (xlogy(k, mu) - mu - gammaln(k + 1.0))
        shift = np.max(log_terms, axis=1)
        terms = np.exp(log_terms - shift[:, None])

        totals = np.array([math.fsum(row[:n]) for row in terms])
        tails = _tail_bound(terms[:, n], terms[:, n + 1])

        if np.all(tails <= ctrl.rel_tol * totals):
            log(f"NCX2: {label} converged with {n} terms (p={dist.p}, lambda={dist.lam:g})", LOG_EXTREME)
            return _restore(sign, totals, shift, label)

        if n >= ctrl.max_terms:
            worst = float(np.max(tails / np.maximum(totals, np.finfo(float).tiny)))
            raise TruncationFailure(
                f"{label} did not converge within max_terms={ctrl.max_terms} "
                f"(p={dist.p}, lambda={dist.lam:g}, relative tail bound {worst:.3g} > rel_tol {ctrl.rel_tol:g})"
            )

        n = min(2 * n, ctrl.max_terms)
        log(f"NCX2: Extending {label} series to {n} terms (p={dist.p}, lambda={dist.lam:g})", LOG_DEBUG)


def _restore(sign, totals, shift, label):
    """sign * totals * exp(shift), refusing to round a finite series up to inf."""
    log_values = np.log(totals) + shift
    if np.any(log_values > _LOG_FLOAT_MAX):
        raise OverflowError(f"{label} exceeds the float range (log value {float(np.max(log_values)):.6g})")
    return sign * np.exp(log_values)


def _is_integer(v):
    return float(v).is_integer()


def _log_gamma_ratio_kernel(p, v) -> Callable[[np.ndarray], np.ndarray]:
    """
    Kernel k -> log(2^v * Gamma(p/2 + k + v) / Gamma(p/2 + k)), the log of
    the v-th moment of a central chi-square with p + 2k degrees of freedom.
    Every factor is positive when p/2 + v > 0.
    """
    if _is_integer(v):
        m = int(v)

        def log_product_kernel(k):
            base = p + 2.0 * k
            out = np.zeros_like(base)
            if m > 0:
                for i in range(m):
                    out = out + np.log(base + 2.0 * i)
            else:
                for j in range(1, -m + 1):
                    out = out - np.log(base - 2.0 * j)
            return out

        return log_product_kernel

    half_p = p / 2.0

    def log_gamma_kernel(k):
        return v * math.log(2.0) + gammaln(half_p + k + v) - gammaln(half_p + k)

    return log_gamma_kernel


def _check_integrable(p, v, context):
    if not math.isfinite(v):
        raise DomainViolation(f"{context}: exponent must be finite, got {v!r}")
    if p / 2.0 + v <= 0:
        raise NonIntegrable(p, v, context)


# ============================================================================
# Public operations
# ============================================================================

def moment(dist: NoncentralChiSquare, v: float, ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """
    E[U^v] for U ~ NoncentralChiSquare(p, lambda).

    Args:
        dist: Distribution of U
        v: Real exponent with p/2 + v > 0
        ctrl: Truncation policy

    Returns:
        float: Series value

    Raises:
        NonIntegrable: If p/2 + v <= 0
        TruncationFailure: If the series needs more than ctrl.max_terms terms
    """
    _check_integrable(dist.p, v, "moment")
    if v == 0:
        return 1.0
    return float(_poisson_series(dist, _log_gamma_ratio_kernel(dist.p, v), ctrl, f"E[U^{v:g}]")[0])


def inverse_moment(dist: NoncentralChiSquare, m: int, ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """
    E[U^-m] = E_K[ prod_{j=1..m} 1 / (p + 2K - 2j) ] for a positive integer m.

    Raises:
        NonIntegrable: If p <= 2m
    """
    if isinstance(m, bool) or not _is_integer(m) or m < 1:
        raise DomainViolation(f"inverse_moment order must be a positive integer, got {m!r}")
    m = int(m)
    if dist.p <= 2 * m:
        raise NonIntegrable(dist.p, -m, "inverse_moment")
    return float(_poisson_series(dist, _log_gamma_ratio_kernel(dist.p, -m), ctrl, f"E[U^-{m}]")[0])


def inverse_moments(dist: NoncentralChiSquare, m_max: int, ctrl: SeriesControl = DEFAULT_CONTROL) -> List[float]:
    """
    [E[U^-1], ..., E[U^-m_max]] evaluated as one series over shared Poisson weights.

    Raises:
        NonIntegrable: If p <= 2 * m_max
    """
    if isinstance(m_max, bool) or not _is_integer(m_max) or m_max < 1:
        raise DomainViolation(f"inverse_moments order must be a positive integer, got {m_max!r}")
    m_max = int(m_max)
    if dist.p <= 2 * m_max:
        raise NonIntegrable(dist.p, -m_max, "inverse_moments")

    def log_stacked(k):
        base = dist.p + 2.0 * k
        rows = []
        running = np.zeros_like(base)
        for j in range(1, m_max + 1):
            running = running - np.log(base - 2.0 * j)
            rows.append(running)
        return np.vstack(rows)

    values = _poisson_series(dist, log_stacked, ctrl, f"E[U^-1..-{m_max}]")
    return [float(x) for x in values]


def moment_derivative(dist: NoncentralChiSquare, v: float, ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """
    d/dlambda E[U^v] = v * 2^(v-1) * sum_k Gamma(p/2+v+k) / Gamma(p/2+1+k) * P(K=k).

    Obtained by differentiating the Poisson weights term by term; the
    result is (E_{p+2}[U^v] - E_p[U^v]) / 2.

    Raises:
        NonIntegrable: If p/2 + v <= 0
    """
    _check_integrable(dist.p, v, "moment_derivative")
    if v == 0:
        return 0.0

    log_central = _log_gamma_ratio_kernel(dist.p, v)
    half_p = dist.p / 2.0
    log_scale = math.log(0.5 * abs(v))

    def log_derivative_kernel(k):
        return log_scale + log_central(k) - np.log(half_p + k)

    series = _poisson_series(dist, log_derivative_kernel, ctrl, f"dE[U^{v:g}]/dlambda", sign=math.copysign(1.0, v))
    return float(series[0])


def moment_ratio(p: int, r: float, s: float, lam: float, ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """
    H_{p,r,s}(lambda) = E[U^r] / E[U^s], nondecreasing in lambda for -p/2 < s <= r < 0.

    Raises:
        DomainViolation: If the (r, s) window is violated
    """
    if not (-p / 2.0 < s <= r < 0):
        raise DomainViolation(f"moment_ratio requires -p/2 < s <= r < 0 (p={p}, r={r}, s={s})")
    dist = NoncentralChiSquare(p, lam)
    if r == s:
        return 1.0
    return moment(dist, r, ctrl) / moment(dist, s, ctrl)


def inverse_power_ratio(p: int, r: float, lam: float, ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """
    E(||X||^(-2r+2)) / E(||X||^(-r)) = E[U^(1-r)] / E[U^(-r/2)] by series.

    Its supremum over lambda, attained at lambda = 0, is sup_inverse_ratio(p, r).
    """
    _check_inverse_ratio_domain(p, r)
    dist = NoncentralChiSquare(p, lam)
    return moment(dist, 1.0 - r, ctrl) / moment(dist, -r / 2.0, ctrl)


def sup_inverse_ratio(p: int, r: float) -> float:
    """
    sup_lambda E(||X||^(-2r+2)) / E(||X||^(-r)) = 2^((2-r)/2) Gamma(p/2 - r + 1) / Gamma((p - r)/2).

    Raises:
        DomainViolation: If either moment fails to exist (needs p > 2r - 2 and p > r)
    """
    _check_inverse_ratio_domain(p, r)
    log_value = (2.0 - r) / 2.0 * math.log(2.0) + gammaln(p / 2.0 - r + 1.0) - gammaln((p - r) / 2.0)
    return float(math.exp(log_value))


def _check_inverse_ratio_domain(p, r):
    if not (p > 2 * r - 2 and p > r):
        raise DomainViolation(
            f"E(||X||^{-2 * r + 2:g}) / E(||X||^{-r:g}) requires p > 2r - 2 and p > r (p={p}, r={r:g})"
        )
