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
Seeded Monte Carlo estimation of balanced-loss risk.

A SimulationPlan fixes the dimension, noncentrality, loss weight, the
estimators to compare, the replication count and the seed. Replications are
split into chunks of chunk_size draws; chunk i draws its normals from its own
generator seeded with SeedSequence([seed, i]), so the output depends only on
the plan, never on how many worker threads evaluate the chunks.

Within a chunk every estimator sees the same draws (common random numbers).
Per-chunk means and sums of squared deviations are combined in chunk order,
which keeps the reduction deterministic.

THREADING MODEL:
- Chunks are independent; with workers > 1 they run on a thread pool
- executor.map returns results in chunk order, the reduction is serial
- numpy releases the GIL inside the vectorized sampling and loss kernels
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Tuple

import numpy as np

from .errors import DomainViolation
from .estimators import ShrinkagePolynomial, estimate
from .log import log, LOG_DEBUG, LOG_INFO, LOG_VERBOSE
from .risk import BalancedLoss, RiskMethod, RiskReport, balanced_loss, make_report

DEFAULT_CHUNK_SIZE = 4096

# Stream tag for the random unit vector used by rotation checks; chunk
# indices never reach it
ROTATION_STREAM = 2 ** 63


@dataclass(frozen=True)
class SimulationPlan:
    """
    One Monte Carlo experiment.

    Attributes:
        p: Dimension
        lam: Noncentrality ||theta||^2
        omega: Loss weight in [0, 1)
        estimators: Estimators evaluated on common draws
        replications: Number of draws (>= 1)
        seed: 64-bit unsigned seed
        chunk_size: Draws per chunk (>= 1)
        workers: Threads evaluating chunks (>= 1); does not affect results
        direction: Unit vector u, theta = sqrt(lam) u (default e_1)
    """
    p: int
    lam: float
    omega: float
    estimators: Tuple[ShrinkagePolynomial, ...]
    replications: int
    seed: int
    chunk_size: int = DEFAULT_CHUNK_SIZE
    workers: int = 1
    direction: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if isinstance(self.p, bool) or int(self.p) != self.p or self.p < 1:
            raise DomainViolation(f"p must be an integer >= 1, got {self.p!r}")
        if not math.isfinite(self.lam) or self.lam < 0:
            raise DomainViolation(f"lambda must be finite and >= 0, got {self.lam!r}")
        BalancedLoss(self.omega)
        if int(self.replications) != self.replications or self.replications < 1:
            raise DomainViolation(f"replications must be an integer >= 1, got {self.replications!r}")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2 ** 64):
            raise DomainViolation(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if int(self.chunk_size) != self.chunk_size or self.chunk_size < 1:
            raise DomainViolation(f"chunk_size must be an integer >= 1, got {self.chunk_size!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise DomainViolation(f"workers must be an integer >= 1, got {self.workers!r}")
        for name in ("p", "replications", "seed", "chunk_size", "workers"):
            object.__setattr__(self, name, int(getattr(self, name)))

        ests = tuple(self.estimators)
        if not ests:
            raise DomainViolation("SimulationPlan needs at least one estimator")
        for est in ests:
            if est.p is not None and est.p != self.p:
                raise DomainViolation(f"{est!r} is tuned for p={est.p}, plan has p={self.p}")
        object.__setattr__(self, "estimators", ests)

        if self.direction is not None:
            u = np.asarray(self.direction, dtype=float)
            norm = float(np.linalg.norm(u))
            if u.shape != (self.p,) or norm == 0.0 or not math.isfinite(norm):
                raise DomainViolation(f"direction must be a nonzero finite vector of length {self.p}")
            object.__setattr__(self, "direction", tuple(float(c) for c in u / norm))

    @property
    def theta(self):
        """theta = sqrt(lambda) * direction (default (sqrt(lambda), 0, ..., 0))."""
        if self.direction is None:
            theta = np.zeros(self.p)
            theta[0] = math.sqrt(self.lam)
            return theta
        return math.sqrt(self.lam) * np.asarray(self.direction)

    @property
    def n_chunks(self):
        return (self.replications + self.chunk_size - 1) // self.chunk_size


@dataclass(frozen=True)
class McEstimate:
    """Sample mean of the loss, its standard error and the replication count."""
    mean: float
    stderr: float
    replications: int


def chunk_generator(seed, chunk_index):
    """Generator for one chunk: SeedSequence([seed, chunk_index])."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(chunk_index)]))


def _run_chunk(plan: SimulationPlan, theta, chunk_index):
    """
    Evaluate all estimators on one chunk of draws.

    Returns:
        numpy array (n_estimators, 3): count, mean, sum of squared deviations
    """
    start = chunk_index * plan.chunk_size
    n = min(plan.chunk_size, plan.replications - start)
    rng = chunk_generator(plan.seed, chunk_index)
    x = theta + rng.standard_normal((n, plan.p))
    loss = BalancedLoss(plan.omega)

    stats = np.empty((len(plan.estimators), 3))
    for i, est in enumerate(plan.estimators):
        losses = balanced_loss(loss, estimate(est, x), x, theta)
        mean = float(np.mean(losses))
        stats[i] = (n, mean, float(np.sum((losses - mean) ** 2)))
    return stats


def _combine(acc, part):
    """Merge two (count, mean, M2) summaries, row by row."""
    if acc is None:
        return part.copy()
    n_a, mean_a, m2_a = acc[:, 0], acc[:, 1], acc[:, 2]
    n_b, mean_b, m2_b = part[:, 0], part[:, 1], part[:, 2]
    n = n_a + n_b
    delta = mean_b - mean_a
    out = np.empty_like(acc)
    out[:, 0] = n
    out[:, 1] = mean_a + delta * n_b / n
    out[:, 2] = m2_a + m2_b + delta * delta * n_a * n_b / n
    return out


def simulate_risk(plan: SimulationPlan) -> List[McEstimate]:
    """
    Monte Carlo balanced-loss risk of every estimator in the plan.

    Returns:
        list of McEstimate in plan.estimators order

    Raises:
        SingularObservation: If a draw lands exactly on the origin
    """
    theta = plan.theta
    n_chunks = plan.n_chunks
    started = time.time()
    log(f"MonteCarlo: {plan.replications} replications in {n_chunks} chunks "
        f"(p={plan.p}, lambda={plan.lam:g}, omega={plan.omega:g}, seed={plan.seed}, workers={plan.workers})",
        LOG_VERBOSE)

    run = partial(_run_chunk, plan, theta)
    acc = None
    if plan.workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=plan.workers, thread_name_prefix="MC-Chunk") as executor:
            for index, part in enumerate(executor.map(run, range(n_chunks))):
                acc = _combine(acc, part)
                log(f"MonteCarlo: chunk {index + 1}/{n_chunks} merged", LOG_DEBUG)
    else:
        for index in range(n_chunks):
            acc = _combine(acc, run(index))

    results = []
    for count, mean, m2 in acc:
        count = int(count)
        variance = m2 / (count - 1) if count > 1 else 0.0
        results.append(McEstimate(mean=float(mean), stderr=math.sqrt(variance / count), replications=count))

    log(f"MonteCarlo: finished {plan.replications} replications in {time.time() - started:.2f}s", LOG_VERBOSE)
    return results


def mc_report(plan: SimulationPlan, est: ShrinkagePolynomial, result: McEstimate) -> RiskReport:
    """Wrap a Monte Carlo estimate as a RiskReport."""
    return make_report(result.mean, RiskMethod.MONTE_CARLO, plan.p, plan.lam, plan.omega,
                       est.coeffs, est.family, est.convention, stderr=result.stderr,
                       replications=result.replications)


@dataclass(frozen=True)
class RotationCheck:
    """Outcome of comparing theta = sqrt(lambda) e_1 against a random direction."""
    passed: bool
    axis: McEstimate
    rotated: McEstimate
    combined_stderr: float
    direction: Tuple[float, ...] = field(default_factory=tuple)

    @property
    def difference(self):
        return abs(self.axis.mean - self.rotated.mean)


def random_direction(p, seed):
    """Seeded random unit vector in R^p."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), ROTATION_STREAM]))
    while True:
        u = rng.standard_normal(p)
        norm = float(np.linalg.norm(u))
        if norm > 0.0:
            return tuple(float(c) for c in u / norm)


def compare_rotations(p, lam, omega, est, seed, reps, chunk_size=DEFAULT_CHUNK_SIZE, workers=1) -> RotationCheck:
    """
    Simulate the same estimator with theta along e_1 and along a seeded random
    unit vector; pass iff the means differ by at most 5 combined standard errors.
    """
    direction = random_direction(p, seed)
    common = dict(p=p, lam=lam, omega=omega, estimators=(est,), replications=reps,
                  seed=seed, chunk_size=chunk_size, workers=workers)
    axis = simulate_risk(SimulationPlan(**common))[0]
    rotated = simulate_risk(SimulationPlan(direction=direction, **common))[0]

    combined = math.sqrt(axis.stderr ** 2 + rotated.stderr ** 2)
    passed = abs(axis.mean - rotated.mean) <= 5.0 * combined
    log(f"MonteCarlo: rotation check {est.family} p={p} lambda={lam:g}: "
        f"{axis.mean:.6g} vs {rotated.mean:.6g} (5 x stderr = {5.0 * combined:.3g}) -> "
        f"{'ok' if passed else 'MISMATCH'}", LOG_INFO if passed else LOG_VERBOSE)
    return RotationCheck(passed, axis, rotated, combined, direction)


def rotation_invariance_check(p, lam, omega, est, seed, reps, chunk_size=DEFAULT_CHUNK_SIZE) -> bool:
    """True iff the simulated risk does not depend on the direction of theta."""
    return compare_rotations(p, lam, omega, est, seed, reps, chunk_size).passed
