"""Diagnostics: Wasserstein distances, Monte Carlo radius and excess
error, coverage, enlarged-interval mass, CRPS, and NLPD.

Monte Carlo estimators return a :class:`McEstimate` carrying a standard
error; downstream checks use +-3 sigma bands throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from ._validation import check_positive_int, check_symmetric

__all__ = [
    "CredibleInterval",
    "McEstimate",
    "w2_gaussian",
    "w2_empirical_1d",
    "radius_mc",
    "excess_mc",
    "coverage",
    "enlarged_coverage",
    "crps_ensemble",
    "nlpd_gaussian_mixture",
    "gaussian_interval",
    "empirical_interval",
]


@dataclass(frozen=True)
class CredibleInterval:
    """Closed interval [lo, hi] at the given coverage level in (0, 1)."""

    lo: float
    hi: float
    level: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"lo ({self.lo}) must not exceed hi ({self.hi})")
        if not 0.0 < self.level < 1.0:
            raise ValueError(f"level must be in (0, 1), got {self.level}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def enlarged(self, delta: float) -> "CredibleInterval":
        if delta < 0:
            raise ValueError(f"delta must be nonnegative, got {delta}")
        return CredibleInterval(self.lo - delta, self.hi + delta, self.level)


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo estimate with its standard error."""

    value: float
    std_error: float
    replications: int

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be nonnegative")
        check_positive_int(self.replications, "replications")


def _psd_sqrt_eigvals(mat: np.ndarray, name: str) -> np.ndarray:
    """Eigenvalues of a PSD matrix, clamped at zero; rejects matrices
    more than 1e-10 below PSD (relative to their scale)."""
    vals = np.linalg.eigvalsh(mat)
    scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
    if np.min(vals) < -1e-10 * scale:
        raise ValueError(f"{name} is not PSD within tolerance")
    return np.maximum(vals, 0.0)


def _psd_sqrt(mat: np.ndarray, name: str) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
    if np.min(vals) < -1e-10 * scale:
        raise ValueError(f"{name} is not PSD within tolerance")
    vals = np.maximum(vals, 0.0)
    return (vecs * np.sqrt(vals)) @ vecs.T


def w2_gaussian(m1, C1, m2, C2) -> float:
    """Squared 2-Wasserstein distance between two Gaussians.

    Computed in closed form as ||m1 - m2||^2 + tr(C1 + C2 -
    2 (C2^{1/2} C1 C2^{1/2})^{1/2}); symmetric in its arguments and zero
    exactly when the Gaussians coincide. Covariances must be symmetric
    PSD (negative eigenvalues within 1e-10 of zero are clamped).
    """
    m1 = np.atleast_1d(np.asarray(m1, dtype=np.float64))
    m2 = np.atleast_1d(np.asarray(m2, dtype=np.float64))
    C1 = check_symmetric(np.atleast_2d(np.asarray(C1, dtype=np.float64)), "C1", tol=1e-8)
    C2 = check_symmetric(np.atleast_2d(np.asarray(C2, dtype=np.float64)), "C2", tol=1e-8)
    if m1.shape != m2.shape:
        raise ValueError("mean vectors must have the same length")
    root2 = _psd_sqrt(C2, "C2")
    cross = _psd_sqrt_eigvals(root2 @ C1 @ root2, "C2^1/2 C1 C2^1/2")
    value = (
        float(np.sum((m1 - m2) ** 2))
        + float(np.trace(C1))
        + float(np.trace(C2))
        - 2.0 * float(np.sum(np.sqrt(cross)))
    )
    # The closed form is nonnegative; tiny negatives are roundoff.
    return max(value, 0.0)


def w2_empirical_1d(samples_a, samples_b) -> float:
    """Squared 2-Wasserstein distance between 1-D empirical measures.

    With equal sample counts this is the mean squared difference of
    aligned order statistics (the monotone coupling). With unequal
    counts both samples are read off at the mid-quantiles
    (i + 0.5) / M for M = max(count_a, count_b) and paired there.
    """
    a = np.sort(np.asarray(samples_a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(samples_b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    if a.size != b.size:
        grid = (np.arange(max(a.size, b.size)) + 0.5) / max(a.size, b.size)
        a = np.quantile(a, grid)
        b = np.quantile(b, grid)
    return float(np.mean((a - b) ** 2))


def _mc_summary(values: np.ndarray) -> McEstimate:
    values = np.asarray(values, dtype=np.float64)
    reps = values.size
    se = float(values.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
    return McEstimate(value=float(values.mean()), std_error=se, replications=reps)


def radius_mc(task, j: int, reps: int, rng: np.random.Generator) -> McEstimate:
    """Monte Carlo posterior radius: E ||theta_p - posterior mean||^2.

    Per replication, a true parameter is drawn from the task prior, j
    observations are simulated, and one posterior draw is compared with
    the posterior mean in the task's norm. The task must provide
    sample_theta0, sample_data, posterior (with .mean and .sample), and
    norm_sq.
    """
    check_positive_int(j, "j")
    check_positive_int(reps, "reps")
    values = np.empty(reps)
    for r in range(reps):
        theta0 = task.sample_theta0(rng)
        data = task.sample_data(theta0, j, rng)
        post = task.posterior(data)
        values[r] = task.norm_sq(post.sample(rng) - post.mean)
    return _mc_summary(values)


def excess_mc(
    task,
    estimator: Callable[[np.ndarray], np.ndarray],
    j: int,
    reps: int,
    rng: np.random.Generator,
) -> McEstimate:
    """Monte Carlo excess error of an estimator over the posterior mean.

    Per replication, with theta0 and data shared between both terms
    (paired differences cut the variance):
    ||estimator(data) - theta0||^2 - ||posterior mean - theta0||^2.
    """
    check_positive_int(j, "j")
    check_positive_int(reps, "reps")
    values = np.empty(reps)
    for r in range(reps):
        theta0 = task.sample_theta0(rng)
        data = task.sample_data(theta0, j, rng)
        post = task.posterior(data)
        theta_check = estimator(data)
        values[r] = task.norm_sq(theta_check - theta0) - task.norm_sq(
            post.mean - theta0
        )
    return _mc_summary(values)


def coverage(intervals, truths) -> float:
    """Fraction of truths inside their (closed) intervals."""
    truths = np.asarray(truths, dtype=np.float64).ravel()
    intervals = list(intervals)
    if len(intervals) != truths.size:
        raise ValueError(
            f"got {len(intervals)} intervals but {truths.size} truths"
        )
    if not intervals:
        raise ValueError("need at least one interval")
    hits = sum(iv.contains(t) for iv, t in zip(intervals, truths))
    return hits / len(intervals)


def enlarged_coverage(
    mp_samples,
    posterior_sampler: Callable[[np.random.Generator, int], np.ndarray],
    gamma: float,
    delta: float,
    reps: int,
    rng: np.random.Generator,
) -> McEstimate:
    """Posterior mass of the delta-enlarged central MP interval.

    The base set is the central (1 - gamma) empirical interval of the
    MP samples, widened by delta on both sides; the returned rate is the
    Monte Carlo posterior probability of landing inside.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    check_positive_int(reps, "reps")
    samples = np.asarray(mp_samples, dtype=np.float64).ravel()
    if samples.size == 0:
        raise ValueError("mp_samples must be nonempty")
    lo, hi = np.quantile(samples, [gamma / 2.0, 1.0 - gamma / 2.0])
    interval = CredibleInterval(lo, hi, 1.0 - gamma).enlarged(delta)
    draws = np.asarray(posterior_sampler(rng, reps), dtype=np.float64).ravel()
    inside = (draws >= interval.lo) & (draws <= interval.hi)
    rate = float(inside.mean())
    se = float(np.sqrt(rate * (1.0 - rate) / reps))
    return McEstimate(value=rate, std_error=se, replications=reps)


def crps_ensemble(predictive_samples, y: float) -> float:
    """CRPS estimate E|Y - y| - 0.5 E|Y - Y'| over an ensemble.

    The second expectation averages over all ordered sample pairs
    (including self-pairs), computed in O(K log K) via sorting.
    """
    x = np.asarray(predictive_samples, dtype=np.float64).ravel()
    if x.size < 2:
        raise ValueError("CRPS needs at least 2 predictive samples")
    k = x.size
    term1 = float(np.mean(np.abs(x - float(y))))
    s = np.sort(x)
    # sum over ordered pairs |x_i - x_j| = 2 * sum_k (2k - K + 1) s_k.
    pair_sum = 2.0 * float(np.sum((2.0 * np.arange(k) - k + 1) * s))
    return term1 - 0.5 * pair_sum / k**2


def nlpd_gaussian_mixture(member_means, member_vars, y: float) -> float:
    """Negative log density of an equal-weight Gaussian mixture at y."""
    means = np.asarray(member_means, dtype=np.float64).ravel()
    variances = np.asarray(member_vars, dtype=np.float64).ravel()
    if means.shape != variances.shape:
        raise ValueError("member_means and member_vars must match in length")
    if np.any(variances <= 0.0):
        raise ValueError("member variances must be positive")
    logs = (
        -0.5 * np.log(2.0 * np.pi * variances)
        - 0.5 * (float(y) - means) ** 2 / variances
    )
    return float(-(logsumexp(logs) - np.log(means.size)))


def gaussian_interval(
    mean: float, std: float, level: float, inflation: float = 1.0
) -> CredibleInterval:
    """Central Gaussian interval mean +- z * sqrt(inflation) * std.

    inflation multiplies the variance (it is a covariance multiplier),
    hence the square root on the width.
    """
    if std < 0:
        raise ValueError("std must be nonnegative")
    if inflation <= 0:
        raise ValueError("inflation must be positive")
    z = norm.ppf(0.5 + level / 2.0)
    half = z * np.sqrt(inflation) * std
    return CredibleInterval(mean - half, mean + half, level)


def empirical_interval(samples, level: float) -> CredibleInterval:
    """Central empirical-quantile interval at the given level."""
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size == 0:
        raise ValueError("samples must be nonempty")
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(samples, [tail, 1.0 - tail])
    return CredibleInterval(float(lo), float(hi), level)
