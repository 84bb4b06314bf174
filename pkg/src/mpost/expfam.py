"""Exponential-family models with conjugate priors and sequential MLE.

Three families are supported, all parameterized by their mean parameter
(the expectation of the sufficient statistic, which is the identity map
for every family here):

* ``gaussian``: d-dimensional Gaussian with known SPD covariance, mean
  parameter unrestricted.
* ``bernoulli``: d independent coin flips, mean in (0, 1) per coordinate.
* ``exponential``: d independent exponential variates, mean (= 1/rate)
  positive per coordinate.

Bernoulli and exponential vectors are treated as product families, so
every formula applies coordinatewise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import (
    as_float_vector,
    check_positive,
    check_positive_int,
    check_spd,
)
from .engine import (
    ChainDataset,
    EnsembleResult,
    EstimatorHandle,
    MpRunConfig,
    _safe_inflation,
)
from .seeds import rng_for
from .summaries import GaussianSummary

__all__ = [
    "ExpFamilyModel",
    "ConjugatePrior",
    "ConjugatePosterior",
    "ExpFamilyTask",
    "seq_mle_update",
    "conjugate_posterior",
    "radius_closed_form",
    "seq_mle_handle",
    "gaussian_seq_mle_ensemble",
]

FAMILIES = ("gaussian", "bernoulli", "exponential")

# Mean-domain clamp bounds applied after every chain update. Boundary hits
# would make synthetic sampling degenerate, so chains are nudged inward and
# the event is counted.
BERNOULLI_MEAN_MIN = 1e-9
BERNOULLI_MEAN_MAX = 1.0 - 1e-9
EXPONENTIAL_MEAN_MIN = 1e-9


class ExpFamilyModel:
    """A vectorized exponential-family model in mean parametrization.

    Args:
        family: one of ``"gaussian"``, ``"bernoulli"``, ``"exponential"``.
        dim: number of coordinates d.
        cov: d x d SPD covariance, required for (and only for) the
            gaussian family.
    """

    def __init__(self, family: str, dim: int, cov=None):
        if family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
        self.family = family
        self.dim = check_positive_int(dim, "dim")
        if family == "gaussian":
            if cov is None:
                cov = np.eye(self.dim)
            cov = check_spd(np.atleast_2d(np.asarray(cov, dtype=np.float64)), "cov")
            if cov.shape[0] != self.dim:
                raise ValueError(
                    f"cov has shape {cov.shape}, expected ({dim}, {dim})"
                )
            self.cov = cov
            self._chol = np.linalg.cholesky(cov)
            self._cov_inv = np.linalg.inv(cov)
        else:
            if cov is not None:
                raise ValueError(f"cov is only meaningful for the gaussian family")
            self.cov = None
            self._chol = None
            self._cov_inv = None

    def __repr__(self):
        return f"ExpFamilyModel(family={self.family!r}, dim={self.dim})"

    # -- domains ---------------------------------------------------------

    def check_mean(self, theta) -> np.ndarray:
        """Validate that theta lies in the open mean domain."""
        theta = as_float_vector(theta, "theta", self.dim)
        if self.family == "bernoulli":
            if np.any(theta <= 0.0) or np.any(theta >= 1.0):
                raise ValueError("bernoulli mean must lie in (0, 1) per coordinate")
        elif self.family == "exponential":
            if np.any(theta <= 0.0):
                raise ValueError("exponential mean must be positive per coordinate")
        return theta

    def in_mean_closure(self, value) -> bool:
        value = as_float_vector(value, "value", self.dim)
        if self.family == "bernoulli":
            return bool(np.all(value >= 0.0) and np.all(value <= 1.0))
        if self.family == "exponential":
            return bool(np.all(value >= 0.0))
        return True

    def check_data(self, z) -> np.ndarray:
        """Validate one observation (or a batch with rows as observations)."""
        z = np.asarray(z, dtype=np.float64)
        flat = np.atleast_2d(z)
        if flat.shape[-1] != self.dim:
            raise ValueError(
                f"observation must have {self.dim} coordinates, got shape {z.shape}"
            )
        if not np.all(np.isfinite(flat)):
            raise ValueError("observation contains non-finite entries")
        if self.family == "bernoulli":
            if not np.all((flat == 0.0) | (flat == 1.0)):
                raise ValueError("bernoulli data must be 0 or 1")
        elif self.family == "exponential":
            if not np.all(flat > 0.0):
                raise ValueError("exponential data must be positive")
        return z

    def clamp_mean(self, theta: np.ndarray) -> tuple[np.ndarray, int]:
        """Clamp theta into the valid mean domain.

        Returns the clamped vector and the number of coordinates that hit
        the clamp.
        """
        theta = np.asarray(theta, dtype=np.float64)
        if self.family == "bernoulli":
            clamped = np.clip(theta, BERNOULLI_MEAN_MIN, BERNOULLI_MEAN_MAX)
        elif self.family == "exponential":
            clamped = np.maximum(theta, EXPONENTIAL_MEAN_MIN)
        else:
            return theta, 0
        return clamped, int(np.sum(clamped != theta))

    # -- core operations -------------------------------------------------

    def sufficient_stat(self, z) -> np.ndarray:
        """T(z); the identity for all supported families."""
        return np.asarray(self.check_data(z), dtype=np.float64)

    def sample(self, theta, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Draw from p_theta; returns shape (d,) or (size, d)."""
        theta = self.check_mean(theta)
        n = 1 if size is None else int(size)
        if self.family == "gaussian":
            out = theta + rng.standard_normal((n, self.dim)) @ self._chol.T
        elif self.family == "bernoulli":
            out = (rng.random((n, self.dim)) < theta).astype(np.float64)
        else:
            out = rng.exponential(scale=theta, size=(n, self.dim))
        return out[0] if size is None else out

    def fisher_info(self, theta) -> np.ndarray:
        """Fisher information at theta in mean parametrization."""
        theta = as_float_vector(theta, "theta", self.dim)
        if self.family == "gaussian":
            return self._cov_inv.copy()
        try:
            theta = self.check_mean(theta)
        except ValueError as exc:
            raise ValueError(f"fisher information is singular: {exc}") from exc
        if self.family == "bernoulli":
            return np.diag(1.0 / (theta * (1.0 - theta)))
        return np.diag(1.0 / theta**2)


def seq_mle_update(theta_prev, stat, j: int) -> np.ndarray:
    """One running-mean step: theta + (T(z_j) - theta) / j.

    Args:
        theta_prev: current estimate (ignored when j == 1).
        stat: sufficient statistic of the j-th observation.
        j: index of the observation being folded in, starting at 1.

    Folding observations 1..j through this update yields exactly the
    sample mean of their sufficient statistics.
    """
    j = check_positive_int(j, "j")
    theta_prev = np.asarray(theta_prev, dtype=np.float64)
    stat = np.asarray(stat, dtype=np.float64)
    return theta_prev + (stat - theta_prev) / j


@dataclass(frozen=True)
class ConjugatePrior:
    """Conjugate prior recorded as pseudo-observations.

    Attributes:
        strength: prior sample count alpha > 0.
        stat_sum: accumulated pseudo sufficient statistic; the prior's
            implied mean is stat_sum / strength.
    """

    strength: float
    stat_sum: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "strength", check_positive(self.strength, "strength"))
        object.__setattr__(
            self, "stat_sum", as_float_vector(self.stat_sum, "stat_sum")
        )

    def validate_for(self, model: ExpFamilyModel) -> None:
        if self.stat_sum.shape[0] != model.dim:
            raise ValueError(
                f"stat_sum has length {self.stat_sum.shape[0]}, model dim is {model.dim}"
            )
        if not model.in_mean_closure(self.stat_sum / self.strength):
            raise ValueError(
                "prior mean stat_sum/strength must lie in the closure of the "
                "mean domain"
            )


class ConjugatePosterior:
    """Closed-form conjugate posterior after folding in observations.

    Acts like an updated :class:`ConjugatePrior` (strength alpha + j,
    statistic theta_pi + sum T(z_i)), with exact samplers per family.
    """

    def __init__(self, model: ExpFamilyModel, strength: float, stat_sum: np.ndarray):
        self.model = model
        self.strength = float(strength)
        self.stat_sum = np.asarray(stat_sum, dtype=np.float64)

    @property
    def mean_param(self) -> np.ndarray:
        """Posterior mean of the mean parameter: stat_sum / strength."""
        return self.stat_sum / self.strength

    @property
    def mean(self) -> np.ndarray:
        """Alias for mean_param (common posterior interface)."""
        return self.mean_param

    def as_prior(self) -> ConjugatePrior:
        return ConjugatePrior(self.strength, self.stat_sum)

    def gaussian_summary(self) -> GaussianSummary:
        """Exact Gaussian summary; defined for the gaussian family only."""
        if self.model.family != "gaussian":
            raise ValueError(
                "closed-form Gaussian posterior summary requires the gaussian "
                "family; use Monte Carlo sampling instead"
            )
        return GaussianSummary(
            mean=self.mean_param, cov=self.model.cov / self.strength, exact=True
        )

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Draw mean-parameter values from the exact posterior.

        gaussian: N(mean, cov/strength). bernoulli: coordinatewise
        Beta(stat_sum, strength - stat_sum). exponential: rate drawn from
        Gamma(strength + 1, rate=stat_sum) and inverted to a mean.
        """
        n = 1 if size is None else int(size)
        d = self.model.dim
        if self.model.family == "gaussian":
            scale = self.model._chol / np.sqrt(self.strength)
            out = self.mean_param + rng.standard_normal((n, d)) @ scale.T
        elif self.model.family == "bernoulli":
            a = self.stat_sum
            b = self.strength - self.stat_sum
            if np.any(a <= 0.0) or np.any(b <= 0.0):
                raise ValueError(
                    "bernoulli posterior sampling needs positive mass on both "
                    "outcomes; got pseudo-counts a={}, b={}".format(a, b)
                )
            out = rng.beta(a, b, size=(n, d))
        else:
            if np.any(self.stat_sum <= 0.0):
                raise ValueError("exponential posterior needs a positive stat_sum")
            rate = rng.gamma(self.strength + 1.0, 1.0 / self.stat_sum, size=(n, d))
            out = 1.0 / rate
        return out[0] if size is None else out


def conjugate_posterior(
    model: ExpFamilyModel, prior: ConjugatePrior, data
) -> ConjugatePosterior:
    """Fold observations into a conjugate prior.

    Args:
        model: the generating family.
        prior: conjugate prior (strength, stat_sum).
        data: iterable of observations, or an (n, d) array; may be empty.

    Returns:
        ConjugatePosterior with strength + n and stat_sum + sum of
        sufficient statistics.
    """
    prior.validate_for(model)
    rows = [as_float_vector(z, "observation", model.dim) for z in data]
    if not rows:
        return ConjugatePosterior(model, prior.strength, prior.stat_sum.copy())
    stacked = model.check_data(np.stack(rows))
    stats = np.atleast_2d(np.asarray(stacked, dtype=np.float64))
    return ConjugatePosterior(
        model,
        prior.strength + stats.shape[0],
        prior.stat_sum + stats.sum(axis=0),
    )


def radius_closed_form(model: ExpFamilyModel, prior: ConjugatePrior, j: int) -> float:
    """Exact squared posterior radius tr(cov)/(j + strength).

    Only the gaussian family admits this closed form; other families go
    through the Monte Carlo estimator in :mod:`mpost.metrics`.
    """
    if model.family != "gaussian":
        raise ValueError(
            "closed-form radius requires the gaussian family; use the Monte "
            "Carlo radius estimator for other families"
        )
    prior.validate_for(model)
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    return float(np.trace(model.cov) / (j + prior.strength))


@dataclass(frozen=True)
class ExpFamilyTask:
    """Adapter bundling a model and prior for Monte Carlo diagnostics.

    Provides the sampling interface expected by the radius and excess
    error estimators: draw a true parameter from the prior, simulate
    data, and expose the exact posterior. Distances use the Euclidean
    norm on mean parameters.
    """

    model: ExpFamilyModel
    prior: ConjugatePrior

    def sample_theta0(self, rng: np.random.Generator, size: int | None = None):
        return ConjugatePosterior(
            self.model, self.prior.strength, self.prior.stat_sum
        ).sample(rng, size=size)

    def sample_data(self, theta0, j: int, rng: np.random.Generator) -> np.ndarray:
        return self.model.sample(theta0, rng, size=j)

    def posterior(self, data) -> ConjugatePosterior:
        return conjugate_posterior(self.model, self.prior, data)

    def norm_sq(self, v) -> float:
        v = np.asarray(v, dtype=np.float64)
        return float(np.dot(v, v))


def seq_mle_handle(model: ExpFamilyModel) -> EstimatorHandle:
    """Chain plug-in running the sequential MLE for an exp-family model.

    The fit is the running mean of sufficient statistics, tracked
    exactly in the dataset cache, so a refit is an exact incremental
    mean update and the warm-start anchor carries no extra information.
    Domain clamping (via the handle's clamp hook) applies to the
    parameter used for sampling; the cached running mean stays exact.
    """

    def init_fit(ds: ChainDataset, rng: np.random.Generator) -> np.ndarray:
        data = np.atleast_2d(np.asarray(ds.real, dtype=np.float64))
        model.check_data(data)
        ds.cache["count"] = data.shape[0]
        ds.cache["mean"] = data.mean(axis=0)
        return ds.cache["mean"].copy()

    def refit(
        ds: ChainDataset, anchor: np.ndarray, rng: np.random.Generator
    ) -> np.ndarray:
        batch = np.atleast_2d(np.asarray(ds.new, dtype=np.float64))
        count = ds.cache["count"]
        mean = ds.cache["mean"]
        m = batch.shape[0]
        mean = mean + (batch.sum(axis=0) - m * mean) / (count + m)
        ds.cache["count"] = count + m
        ds.cache["mean"] = mean
        return mean.copy()

    def synth_gen(
        theta: np.ndarray, count: int, rng: np.random.Generator, ds: ChainDataset
    ) -> np.ndarray:
        return model.sample(theta, rng, size=count)

    clamp = None if model.family == "gaussian" else model.clamp_mean
    return EstimatorHandle(
        init_fit=init_fit, refit=refit, synth_gen=synth_gen, clamp=clamp
    )


def gaussian_seq_mle_ensemble(
    model: ExpFamilyModel, data, config: MpRunConfig
) -> EnsembleResult:
    """Vectorized ensemble driver for the Gaussian sequential MLE.

    Algebraically identical to ``run_ensemble(seq_mle_handle(model),
    data, config)``: because each synthetic draw is z = theta + eps with
    eps ~ N(0, cov) independent of theta, the chain recursion telescopes
    to theta_final = theta_hat + sum of innovations weighted by the
    reciprocal running counts. Every innovation is still drawn, from the
    same per-chain substreams and in the same stream order as the
    generic driver, so members agree with it to floating-point
    reassociation error; only the Python-level loop is removed.
    """
    if model.family != "gaussian":
        raise ValueError("the vectorized driver supports the gaussian family only")
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    model.check_data(data)
    n0 = data.shape[0]
    theta_hat = data.mean(axis=0)
    rounds = config.cap_n // config.delta_n
    total = rounds * config.delta_n
    if total == 0:
        members = np.tile(theta_hat, (config.k, 1))
        return EnsembleResult(members=members, inflation=1.0)
    counts = n0 + config.delta_n * np.arange(1, rounds + 1, dtype=np.float64)
    weights = np.repeat(1.0 / counts, config.delta_n)
    members = np.empty((config.k, model.dim))
    chol_t = model._chol.T
    for i in range(config.k):
        rng = rng_for(config.seed, i)
        noise = rng.standard_normal((total, model.dim))
        members[i] = theta_hat + (weights @ noise) @ chol_t
    return EnsembleResult(members=members, inflation=_safe_inflation(config))
