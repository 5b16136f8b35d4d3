"""
Polynomial shrinkage estimators of a multivariate normal mean under
balanced loss.

    from shrinkage import estimators, risk

    est = estimators.poly(2, p=14, omega=0.1)
    report = risk.exact_risk_general(est, p=14, lam=5.0019)
    report.ratio_to_mle

Modules:
    ncx2         moments of the noncentral chi-square distribution
    estimators   MLE, James-Stein and degree 2..4 polynomial estimators
    risk         exact risk under balanced loss
    montecarlo   seeded, chunked Monte Carlo risk estimation
    reference    published tables and figure presets
    verify       verification suites
    cli          the ``balanced-shrinkage`` command
"""

__version__ = "0.1.0"

from .errors import (
    ConventionUnsupported,
    DimensionTooSmall,
    DomainViolation,
    LengthMismatch,
    NonIntegrable,
    ShrinkageError,
    SingularObservation,
    TruncationFailure,
)
from .estimators import CoefficientConvention, ShrinkagePolynomial, james_stein, mle, poly
from .ncx2 import NoncentralChiSquare, SeriesControl
from .risk import BalancedLoss, RiskMethod, RiskReport, exact_risk_chained, exact_risk_general

__all__ = [
    "__version__",
    "BalancedLoss",
    "CoefficientConvention",
    "ConventionUnsupported",
    "DimensionTooSmall",
    "DomainViolation",
    "LengthMismatch",
    "NonIntegrable",
    "NoncentralChiSquare",
    "RiskMethod",
    "RiskReport",
    "SeriesControl",
    "ShrinkageError",
    "ShrinkagePolynomial",
    "SingularObservation",
    "TruncationFailure",
    "exact_risk_chained",
    "exact_risk_general",
    "james_stein",
    "mle",
    "poly",
]
