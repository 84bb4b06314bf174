"""Generic driver for iterative-parametric-bootstrap chains.

A chain starts from an initial fit on the real data, then repeatedly
draws a batch of synthetic observations from the current fit, appends
it, and refits warm-started at the previous parameter. An ensemble runs
K independent chains on the same data with per-chain RNG substreams and
summarizes their final parameters.

The driver is agnostic to the model: everything problem-specific lives
in an :class:`EstimatorHandle`.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from ._validation import check_positive_int
from .errors import ConfigError
from .seeds import rng_for

__all__ = [
    "ChainDataset",
    "EstimatorHandle",
    "MpRunConfig",
    "EnsembleResult",
    "run_mp_chain",
    "run_ensemble",
    "online_mp_step",
    "gd_step",
    "inflation_factor",
    "worker_count",
]

logger = logging.getLogger(__name__)


class ChainDataset:
    """Append-only dataset owned by one chain.

    Attributes:
        real: the original data in the estimator's native format.
        batches: synthetic batches in append order.
        new: the most recently appended batch (what a refit must fold in).
        cache: scratch space for estimator running aggregates.
    """

    __slots__ = ("real", "batches", "new", "cache")

    def __init__(self, real: Any):
        self.real = real
        self.batches: list[Any] = []
        self.new: Any = None
        self.cache: dict[str, Any] = {}

    def append(self, batch: Any) -> None:
        self.batches.append(batch)
        self.new = batch


@dataclass(frozen=True)
class EstimatorHandle:
    """Problem-specific plug-ins for the chain driver.

    Attributes:
        init_fit: (dataset, rng) -> parameter vector; the base algorithm
            applied to the real data. May use rng for initialization
            randomness (set init_randomness accordingly).
        refit: (dataset, anchor, rng) -> parameter vector; folds
            ``dataset.new`` into the fit, warm-started at ``anchor``.
            Must be deterministic given its inputs and rng stream.
        synth_gen: (theta, count, rng, dataset) -> batch of `count`
            synthetic observations from the fitted model at theta.
        clamp: optional (theta) -> (theta', hits) domain projection
            applied after every fit.
        data_size: returns the number of observations in a dataset in
            the estimator's native format.
        take: (data, index array) -> sub-dataset, for resampling.
        init_randomness: whether init_fit consumes rng draws; drives the
            degenerate flag of init-randomness ensembles.
    """

    init_fit: Callable[[ChainDataset, np.random.Generator], np.ndarray]
    refit: Callable[[ChainDataset, np.ndarray, np.random.Generator], np.ndarray]
    synth_gen: Callable[[np.ndarray, int, np.random.Generator, ChainDataset], Any]
    clamp: Callable[[np.ndarray], tuple[np.ndarray, int]] | None = None
    data_size: Callable[[Any], int] = len
    take: Callable[[Any, np.ndarray], Any] = lambda data, idx: data[idx]
    init_randomness: bool = False


@dataclass(frozen=True)
class MpRunConfig:
    """Run geometry: n real points, batches of delta_n synthetic points
    up to horizon cap_n, k chains, base seed.

    The number of synthetic rounds is floor(cap_n / delta_n); any
    remainder is dropped (and logged). cap_n = 0 disables the synthetic
    phase entirely.
    """

    n: int
    delta_n: int
    cap_n: int
    k: int
    seed: int

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_positive_int(self.delta_n, "delta_n")
        check_positive_int(self.k, "k")
        if self.cap_n < 0:
            raise ConfigError(f"cap_n must be >= 0, got {self.cap_n}")
        if self.cap_n > 0 and self.delta_n > self.cap_n:
            raise ConfigError(
                f"delta_n ({self.delta_n}) must not exceed cap_n ({self.cap_n})"
            )
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must fit in 64 unsigned bits")

    @property
    def num_rounds(self) -> int:
        return self.cap_n // self.delta_n


@dataclass(frozen=True)
class EnsembleResult:
    """Final parameters of K chains plus summary statistics.

    empirical_cov uses ddof=1 (zeros when k == 1). inflation is the
    covariance multiplier for credible-set construction; degenerate
    flags an ensemble whose members are provably identical (e.g. an
    init-randomness ensemble around a deterministic estimator).
    """

    members: np.ndarray
    empirical_mean: np.ndarray = field(init=False)
    empirical_cov: np.ndarray = field(init=False)
    clamp_events: int = 0
    inflation: float = 1.0
    degenerate: bool = False

    def __post_init__(self):
        members = np.atleast_2d(np.asarray(self.members, dtype=np.float64))
        object.__setattr__(self, "members", members)
        k, p = members.shape
        mean = members.mean(axis=0)
        if k == 1:
            cov = np.zeros((p, p))
        else:
            centered = members - mean
            cov = centered.T @ centered / (k - 1)
        cov = 0.5 * (cov + cov.T)
        scale = max(1.0, float(np.max(np.abs(cov))) if cov.size else 1.0)
        if np.min(np.linalg.eigvalsh(cov)) < -1e-10 * scale:
            raise ValueError("ensemble covariance is not PSD within tolerance")
        object.__setattr__(self, "empirical_mean", mean)
        object.__setattr__(self, "empirical_cov", cov)

    @property
    def k(self) -> int:
        return self.members.shape[0]


def _apply_clamp(
    estimator: EstimatorHandle, theta: np.ndarray
) -> tuple[np.ndarray, int]:
    if estimator.clamp is None:
        return theta, 0
    return estimator.clamp(theta)


def _run_chain(
    estimator: EstimatorHandle,
    data: Any,
    config: MpRunConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    ds = ChainDataset(data)
    theta = estimator.init_fit(ds, rng)
    theta, clamps = _apply_clamp(estimator, theta)
    rounds = config.num_rounds
    leftover = config.cap_n - rounds * config.delta_n
    if leftover:
        logger.debug(
            "dropping %d leftover synthetic samples (cap_n=%d, delta_n=%d)",
            leftover,
            config.cap_n,
            config.delta_n,
        )
    for r in range(rounds):
        try:
            batch = estimator.synth_gen(theta, config.delta_n, rng, ds)
            ds.append(batch)
            theta = estimator.refit(ds, theta, rng)
        except Exception as exc:
            if hasattr(exc, "add_note"):
                exc.add_note(f"mp chain failed at synthetic round {r + 1}/{rounds}")
            raise
        theta, hits = _apply_clamp(estimator, theta)
        clamps += hits
    return theta, clamps


def run_mp_chain(
    estimator: EstimatorHandle,
    data: Any,
    config: MpRunConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Run one chain and return its final parameter vector."""
    theta, _ = _run_chain(estimator, data, config, rng)
    return theta


def worker_count() -> int:
    """Worker count from MPOST_THREADS (default 1)."""
    raw = os.environ.get("MPOST_THREADS", "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"MPOST_THREADS must be an integer, got {raw!r}") from exc
    return max(1, value)


def _safe_inflation(config: MpRunConfig) -> float:
    if config.cap_n == 0:
        return 1.0
    try:
        return inflation_factor(config.n, config.delta_n, config.cap_n)
    except ConfigError:
        logger.warning(
            "inflation rule undefined for n=%d, cap_n=%d; using 1.0",
            config.n,
            config.cap_n,
        )
        return 1.0


def run_ensemble(
    estimator: EstimatorHandle,
    data: Any,
    config: MpRunConfig,
    threads: int | None = None,
) -> EnsembleResult:
    """Run K independent chains and summarize their final parameters.

    Chain i draws from the substream (config.seed, i); members are
    merged in chain order regardless of scheduling, so results are
    reproducible bit-for-bit for a fixed config.
    """
    workers = worker_count() if threads is None else max(1, int(threads))

    def one(i: int) -> tuple[np.ndarray, int]:
        return _run_chain(estimator, data, config, rng_for(config.seed, i))

    if workers > 1 and config.k > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, range(config.k)))
    else:
        outcomes = [one(i) for i in range(config.k)]
    members = np.stack([theta for theta, _ in outcomes])
    clamps = int(sum(hits for _, hits in outcomes))
    return EnsembleResult(
        members=members,
        clamp_events=clamps,
        inflation=_safe_inflation(config),
    )


def online_mp_step(
    update_rule: Callable[[np.ndarray, np.ndarray, int], np.ndarray],
    theta: np.ndarray,
    j: int,
    rng: np.random.Generator,
    sampler: Callable[[np.ndarray, np.random.Generator], np.ndarray],
) -> np.ndarray:
    """One online step: draw z ~ p_theta via sampler, apply the rule.

    The update rule maps (theta, z, j) to the next parameter, e.g. the
    running-mean step, the spectral chain step, or a gradient step built
    with :func:`gd_step`. Domain clamping, where the model needs one, is
    the caller's responsibility.
    """
    z = sampler(theta, rng)
    return update_rule(theta, z, check_positive_int(j, "j"))


def gd_step(
    score: Callable[[np.ndarray, np.ndarray], np.ndarray],
    learning_rate: Callable[[int], float],
) -> Callable[[np.ndarray, np.ndarray, int], np.ndarray]:
    """Build a gradient update rule theta + eta_j * score(theta, z)."""

    def update(theta: np.ndarray, z: np.ndarray, j: int) -> np.ndarray:
        return np.asarray(theta, dtype=np.float64) + learning_rate(j) * np.asarray(
            score(theta, z), dtype=np.float64
        )

    return update


def inflation_factor(n: int, delta_n: int, cap_n: int) -> float:
    """Covariance multiplier n^-1 / (1/(n+delta_n) - 1/(cap_n+delta_n)).

    Compensates ensemble covariance for batching (delta_n > 1) and for
    truncating the horizon at cap_n; approaches (n+1)/n as delta_n -> 1
    and cap_n -> infinity. The first-order form 1 + delta_n/n + n/cap_n
    is a heuristic only and is not used.
    """
    check_positive_int(n, "n")
    check_positive_int(delta_n, "delta_n")
    if cap_n <= 0:
        raise ConfigError(f"cap_n must be positive, got {cap_n}")
    denom = 1.0 / (n + delta_n) - 1.0 / (cap_n + delta_n)
    if denom <= 0.0:
        raise ConfigError(
            "inflation factor undefined: cap_n must exceed n for the "
            f"variance rule (n={n}, cap_n={cap_n})"
        )
    return (1.0 / n) / denom
