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
Experiment configuration.

Settings come from three layers, highest precedence first: explicit
command-line flags, a flat key-value file (``--config PATH``, read with
ConfigObj), then built-in defaults. Comma-separated values are lists:

    p = 14, 18
    omega = 0.0, 0.1, 0.2
    lambda = 1.2418, 5.0019
    degrees = JS, 2, 3
    convention = simulation
    method = exact

ExperimentConfig validates the grid; (degree, p) pairs below a family's
dimension threshold are kept aside as skipped cells with their reason.
"""

import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from configobj import ConfigObj, ConfigObjError

from . import estimators
from .errors import DomainViolation
from .estimators import CoefficientConvention
from .log import log, LOG_WARNING

OUTPUT_DIR_ENV = "SHRINKAGE_OUTPUT_DIR"

METHOD_EXACT = "exact"
METHOD_MC = "mc"
METHODS = (METHOD_EXACT, METHOD_MC)

DEFAULT_REPLICATIONS = 100_000
DEFAULT_SEED = 20240101

# Keys a config file may set
CONFIG_KEYS = (
    "p", "omega", "lambda", "degrees", "convention", "method", "replications", "seed",
    "chunk_size", "workers", "output", "table", "figure", "lambda_max", "steps", "quick",
)


def parse_degree(value):
    """
    Family name to degree: MLE -> 0, JS -> 1, "2".."4" -> 2..4.

    Raises:
        DomainViolation: For anything else
    """
    text = str(value).strip().upper()
    if text == "MLE":
        return 0
    if text == "JS":
        return 1
    if text in ("2", "3", "4"):
        return int(text)
    raise DomainViolation(f"Unknown estimator {value!r} (expected MLE, JS, 2, 3 or 4)")


def as_list(value):
    """ConfigObj yields a list for comma-separated values and a string otherwise."""
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        items = value
    else:
        items = str(value).split(",")
    return [item.strip() if isinstance(item, str) else item for item in items
            if not (isinstance(item, str) and not item.strip())]


def as_bool(value):
    if isinstance(value, str):
        return value.strip().lower() in ["yes", "true", "1", "on"]
    return bool(value)


def _floats(values, name):
    try:
        return [float(v) for v in values]
    except (TypeError, ValueError):
        raise DomainViolation(f"{name} must be a list of numbers, got {values!r}") from None


def as_float(value, name):
    return _floats([value], name)[0]


def as_int(value, name):
    return _ints([value], name)[0]


def _ints(values, name):
    out = []
    for v in values:
        try:
            number = float(v)
        except (TypeError, ValueError):
            raise DomainViolation(f"{name} must be a list of integers, got {values!r}") from None
        if not number.is_integer():
            raise DomainViolation(f"{name} must be a list of integers, got {v!r}")
        out.append(int(number))
    return out


@dataclass(frozen=True)
class SkippedCell:
    """A (degree, p) pair left out of a grid, with the reason."""
    degree: int
    p: int
    reason: str


@dataclass
class ExperimentConfig:
    """
    A validated evaluation grid.

    Attributes:
        p_list: Dimensions (>= 1)
        omega_list: Loss weights in [0, 1)
        lambda_list: Noncentralities (>= 0)
        degrees: Families (0 = MLE, 1 = JS, 2..4 = polynomial)
        convention: Coefficient convention for degrees >= 2
        method: "exact" or "mc"
        replications: Monte Carlo draws per cell (mc only)
        seed: Monte Carlo seed (mc only)
        chunk_size: Monte Carlo chunk size
        workers: Monte Carlo worker threads
        output: Output path or None
    """
    p_list: List[int]
    omega_list: List[float]
    lambda_list: List[float]
    degrees: List[int]
    convention: CoefficientConvention = CoefficientConvention.THEOREM
    method: str = METHOD_EXACT
    replications: int = DEFAULT_REPLICATIONS
    seed: int = DEFAULT_SEED
    chunk_size: int = 4096
    workers: int = 1
    output: Optional[str] = None
    skipped: List[SkippedCell] = field(default_factory=list, init=False)

    def __post_init__(self):
        for name in ("p_list", "omega_list", "lambda_list", "degrees"):
            if not getattr(self, name):
                raise DomainViolation(f"{name} must not be empty")

        self.p_list = _ints(self.p_list, "p")
        self.omega_list = _floats(self.omega_list, "omega")
        self.lambda_list = _floats(self.lambda_list, "lambda")
        self.degrees = [d if isinstance(d, int) else parse_degree(d) for d in self.degrees]
        self.convention = CoefficientConvention.parse(self.convention)
        self.method = str(self.method).strip().lower()

        for p in self.p_list:
            if p < 1:
                raise DomainViolation(f"p must be >= 1, got {p}")
        for omega in self.omega_list:
            if not (0.0 <= omega < 1.0):
                raise DomainViolation(f"omega must lie in [0, 1), got {omega!r}")
        for lam in self.lambda_list:
            if not lam >= 0.0 or lam == float("inf"):
                raise DomainViolation(f"lambda must be finite and >= 0, got {lam!r}")
        for degree in self.degrees:
            if degree not in (0, 1, 2, 3, 4):
                raise DomainViolation(f"degree must be 0..4, got {degree!r}")
        if self.method not in METHODS:
            raise DomainViolation(f"method must be one of {', '.join(METHODS)}, got {self.method!r}")
        if self.replications < 1:
            raise DomainViolation(f"replications must be >= 1, got {self.replications}")
        if not (0 <= self.seed < 2 ** 64):
            raise DomainViolation(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.chunk_size < 1 or self.workers < 1:
            raise DomainViolation("chunk_size and workers must be >= 1")

        self.skipped = []
        for degree in self.degrees:
            threshold = estimators.DEGREE_THRESHOLDS.get(degree)
            for p in self.p_list:
                if threshold is not None and p <= threshold:
                    label = "James-Stein" if degree == 1 else f"degree {degree}"
                    reason = f"{label} requires p > {threshold}"
                    self.skipped.append(SkippedCell(degree, p, reason))
                    log(f"Config: skipping {label} at p={p} ({reason})", LOG_WARNING)

        if not self.pairs():
            reasons = "; ".join(f"{s.reason} (got p={s.p})" for s in self.skipped)
            raise DomainViolation(f"No (degree, p) pair in the grid is defined: {reasons}")

    def pairs(self) -> List[Tuple[int, int]]:
        """(p, degree) pairs that are evaluated, in grid order."""
        excluded = {(s.degree, s.p) for s in self.skipped}
        return [(p, d) for p in self.p_list for d in self.degrees if (d, p) not in excluded]

    def degrees_for(self, p) -> List[int]:
        excluded = {s.degree for s in self.skipped if s.p == p}
        return [d for d in self.degrees if d not in excluded]

    @classmethod
    def from_mapping(cls, c: Dict[str, Any]) -> "ExperimentConfig":
        """Build from a merged settings mapping (ConfigObj section or dict)."""
        return cls(
            p_list=as_list(c.get("p")),
            omega_list=as_list(c.get("omega", "0.0")),
            lambda_list=as_list(c.get("lambda")),
            degrees=as_list(c.get("degrees", "JS")),
            convention=c.get("convention", CoefficientConvention.THEOREM.value),
            method=c.get("method", METHOD_EXACT),
            replications=as_int(c.get("replications", DEFAULT_REPLICATIONS), "replications"),
            seed=as_int(c.get("seed", DEFAULT_SEED), "seed"),
            chunk_size=as_int(c.get("chunk_size", 4096), "chunk_size"),
            workers=as_int(c.get("workers", 1), "workers"),
            output=c.get("output"),
        )


def load_file(path) -> Dict[str, Any]:
    """
    Read a flat key-value config file.

    Unknown keys are logged and ignored; sections are rejected.

    Raises:
        DomainViolation: If the file is missing or malformed
    """
    if not os.path.isfile(path):
        raise DomainViolation(f"Config file not found: {path}")
    try:
        c = ConfigObj(path, encoding="utf-8", file_error=True)
    except (ConfigObjError, IOError) as e:
        raise DomainViolation(f"Cannot parse config file {path}: {e}") from None

    if c.sections:
        raise DomainViolation(f"Config file {path} must be flat, found sections {c.sections}")

    values = {}
    for key, value in c.items():
        normalized = key.strip().lower().replace("-", "_")
        if normalized not in CONFIG_KEYS:
            log(f"Config: ignoring unknown key '{key}' in {path}", LOG_WARNING)
            continue
        values[normalized] = value
    return values


def merge(file_values: Optional[Dict[str, Any]], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Flags win over file values; None means "not given on the command line"."""
    merged = dict(file_values or {})
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    return merged


def output_dir(explicit=None):
    """--output-dir, else $SHRINKAGE_OUTPUT_DIR, else the working directory."""
    if explicit:
        return explicit
    return os.environ.get(OUTPUT_DIR_ENV) or "."
