"""Classical ensembling baselines: parametric bootstrap, nonparametric
bootstrap, and init-randomness ensembles.

All three reuse :class:`~mpost.engine.EstimatorHandle` plug-ins but fit
every replicate from scratch (no warm starts), matching the classical
procedures the chain method is compared against. The module also houses
the rare-category gate model used to contrast the two approaches on a
category that bootstrap resamples routinely miss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive, check_positive_int
from .engine import ChainDataset, EnsembleResult, EstimatorHandle
from .seeds import rng_for

__all__ = [
    "parametric_bootstrap",
    "nonparametric_bootstrap",
    "init_ensemble",
    "RareCategoryModel",
]


def _scratch_fit(
    estimator: EstimatorHandle, data, rng: np.random.Generator
) -> np.ndarray:
    theta = estimator.init_fit(ChainDataset(data), rng)
    if estimator.clamp is not None:
        theta, _ = estimator.clamp(theta)
    return theta


def parametric_bootstrap(
    estimator: EstimatorHandle, data, k: int, seed: int
) -> EnsembleResult:
    """Fit once, then refit k times on fresh synthetic datasets.

    Each replicate draws n points from the fitted model and refits from
    scratch on the synthetic data alone, discarding the original sample.
    Replicate i uses the substream (seed, i).
    """
    check_positive_int(k, "k")
    n = estimator.data_size(data)
    # Index -1 is reserved for the base fit so it never collides with a
    # replicate stream and does not move when k changes.
    theta_hat = _scratch_fit(estimator, data, rng_for(seed, -1))
    members = []
    for i in range(k):
        rng = rng_for(seed, i)
        synth = estimator.synth_gen(theta_hat, n, rng, ChainDataset(data))
        members.append(_scratch_fit(estimator, synth, rng))
    return EnsembleResult(members=np.stack(members))


def nonparametric_bootstrap(
    estimator: EstimatorHandle, data, k: int, seed: int
) -> EnsembleResult:
    """Refit k times on with-replacement resamples of the data."""
    check_positive_int(k, "k")
    n = estimator.data_size(data)
    if n < 1:
        raise ValueError("nonparametric bootstrap needs at least one observation")
    members = []
    for i in range(k):
        rng = rng_for(seed, i)
        idx = rng.integers(0, n, size=n)
        members.append(_scratch_fit(estimator, estimator.take(data, idx), rng))
    return EnsembleResult(members=np.stack(members))


def init_ensemble(
    estimator: EstimatorHandle, data, k: int, seed: int
) -> EnsembleResult:
    """k fits of the same data differing only in initialization draws.

    For estimators without initialization randomness all members are
    identical; that is not an error, but the result carries
    ``degenerate=True`` so downstream consumers can refuse to build
    credible sets from it.
    """
    check_positive_int(k, "k")
    members = [_scratch_fit(estimator, data, rng_for(seed, i)) for i in range(k)]
    return EnsembleResult(
        members=np.stack(members), degenerate=not estimator.init_randomness
    )


@dataclass(frozen=True)
class RareCategoryModel:
    """Two-category gate model: z1 ~ Bernoulli(1 - gate_eps) picks a
    category (category 0 is the rare one), z2 | z1 ~ N(mean_{z1}, 1).

    The gate probability is fixed model structure, not estimated: the
    parameter is the pair of category means, fitted with a small ridge
    pull toward zero so a category absent from the data yields exactly
    zero (and zero spread across refits) rather than an undefined mean.
    """

    gate_eps: float = 0.01
    ridge: float = 1e-6

    def __post_init__(self):
        check_positive(self.ridge, "ridge")
        if not 0.0 < self.gate_eps < 1.0:
            raise ValueError(f"gate_eps must be in (0, 1), got {self.gate_eps}")

    def sample(self, theta, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw rows (z1, z2); theta = (mean of category 0, of category 1)."""
        theta = np.asarray(theta, dtype=np.float64)
        cat = (rng.random(size) >= self.gate_eps).astype(np.float64)
        z2 = theta[cat.astype(int)] + rng.standard_normal(size)
        return np.column_stack([cat, z2])

    def fit(self, rows) -> np.ndarray:
        """Ridge-regularized category means sum(z2; cat=c)/(count_c + ridge)."""
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        theta = np.zeros(2)
        for c in (0, 1):
            mask = rows[:, 0] == c
            theta[c] = rows[mask, 1].sum() / (mask.sum() + self.ridge)
        return theta

    def handle(self) -> EstimatorHandle:
        """Chain plug-in; the cache tracks per-category counts and sums so
        refits stay exact on the accumulated dataset."""

        def init_fit(ds: ChainDataset, rng: np.random.Generator) -> np.ndarray:
            rows = np.atleast_2d(np.asarray(ds.real, dtype=np.float64))
            counts = np.zeros(2)
            sums = np.zeros(2)
            for c in (0, 1):
                mask = rows[:, 0] == c
                counts[c] = mask.sum()
                sums[c] = rows[mask, 1].sum()
            ds.cache["counts"] = counts
            ds.cache["sums"] = sums
            return sums / (counts + self.ridge)

        def refit(
            ds: ChainDataset, anchor: np.ndarray, rng: np.random.Generator
        ) -> np.ndarray:
            rows = np.atleast_2d(np.asarray(ds.new, dtype=np.float64))
            counts = ds.cache["counts"]
            sums = ds.cache["sums"]
            for c in (0, 1):
                mask = rows[:, 0] == c
                counts[c] += mask.sum()
                sums[c] += rows[mask, 1].sum()
            return sums / (counts + self.ridge)

        def synth_gen(
            theta: np.ndarray, count: int, rng: np.random.Generator, ds: ChainDataset
        ) -> np.ndarray:
            return self.sample(theta, rng, count)

        return EstimatorHandle(init_fit=init_fit, refit=refit, synth_gen=synth_gen)
