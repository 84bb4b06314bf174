"""Estimator-style front ends over the functional core.

These classes follow the familiar fit/predict pattern with constructor
parameters retrievable via ``get_params``; they validate inputs, run the
chain ensembles, and expose the members and summary statistics as
fitted attributes. The functional modules remain the primitives; these
wrappers are the convenient entry points.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import gp as gpmod
from .baselines import init_ensemble
from .engine import MpRunConfig, run_ensemble
from .errors import ConfigError
from .expfam import ExpFamilyModel, gaussian_seq_mle_ensemble, seq_mle_handle
from .lingauss import SpectralProblem, lg_fast_ensemble, lg_handle
from .metrics import empirical_interval, gaussian_interval
from .seeds import rng_for

__all__ = [
    "ExpFamilyMpEnsemble",
    "SpectralMpEnsemble",
    "RffGpRegressor",
]


def _default_cap(n: int, cap_n, cap_mult: int) -> int:
    return int(cap_n) if cap_n is not None else cap_mult * n


class ExpFamilyMpEnsemble(BaseEstimator):
    """Posterior-style ensemble for an exponential-family mean parameter.

    Fits the running-mean estimator on rows of X, then runs k synthetic
    append-and-refit chains to horizon cap_n in batches of delta_n.

    Parameters:
        family: "gaussian", "bernoulli", or "exponential".
        cov: known covariance for the gaussian family (identity default).
        delta_n: synthetic batch size per round.
        cap_n: synthetic-sample horizon; defaults to cap_mult * n.
        cap_mult: horizon multiplier used when cap_n is None.
        k: number of chains.
        seed: base seed; chain i uses a derived substream.

    Attributes (after fit): members_, mean_, cov_, inflation_,
        clamp_events_, n_features_in_.
    """

    def __init__(
        self,
        family: str = "gaussian",
        cov=None,
        delta_n: int = 1,
        cap_n: int | None = None,
        cap_mult: int = 100,
        k: int = 500,
        seed: int = 0,
    ):
        self.family = family
        self.cov = cov
        self.delta_n = delta_n
        self.cap_n = cap_n
        self.cap_mult = cap_mult
        self.k = k
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=True, dtype=np.float64)
        n, d = X.shape
        model = ExpFamilyModel(self.family, d, cov=self.cov)
        config = MpRunConfig(
            n=n,
            delta_n=self.delta_n,
            cap_n=_default_cap(n, self.cap_n, self.cap_mult),
            k=self.k,
            seed=self.seed,
        )
        if self.family == "gaussian":
            result = gaussian_seq_mle_ensemble(model, X, config)
        else:
            result = run_ensemble(seq_mle_handle(model), X, config)
        self.model_ = model
        self.members_ = result.members
        self.mean_ = result.empirical_mean
        self.cov_ = result.empirical_cov
        self.inflation_ = result.inflation
        self.clamp_events_ = result.clamp_events
        self.n_features_in_ = d
        return self

    def credible_interval(self, coord: int = 0, level: float = 0.9, style: str = "gaussian"):
        """Marginal credible interval for one coordinate.

        style "gaussian" uses mean +- z * sqrt(inflation) * std;
        "empirical" uses member quantiles (uninflated).
        """
        check_is_fitted(self, "members_")
        if style == "gaussian":
            return gaussian_interval(
                float(self.mean_[coord]),
                float(np.sqrt(self.cov_[coord, coord])),
                level,
                inflation=self.inflation_,
            )
        if style == "empirical":
            return empirical_interval(self.members_[:, coord], level)
        raise ConfigError(f"unknown interval style {style!r}")


class SpectralMpEnsemble(BaseEstimator):
    """Chain ensemble for the spectral linear-Gaussian inverse problem.

    Rows of X are observations in SVD coordinates; the chain runs the
    per-observation preconditioned update, which follows the exact
    posterior mean path.
    """

    def __init__(
        self,
        beta: float = 1.0,
        alpha_norm: float = 1.0,
        delta_n: int = 1,
        cap_n: int | None = None,
        cap_mult: int = 100,
        k: int = 500,
        seed: int = 0,
    ):
        self.beta = beta
        self.alpha_norm = alpha_norm
        self.delta_n = delta_n
        self.cap_n = cap_n
        self.cap_mult = cap_mult
        self.k = k
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=True, dtype=np.float64)
        n, d = X.shape
        problem = SpectralProblem(dim=d, beta=self.beta, alpha_norm=self.alpha_norm)
        config = MpRunConfig(
            n=n,
            delta_n=self.delta_n,
            cap_n=_default_cap(n, self.cap_n, self.cap_mult),
            k=self.k,
            seed=self.seed,
        )
        if self.delta_n == 1:
            result = lg_fast_ensemble(problem, X, config)
        else:
            result = run_ensemble(lg_handle(problem), X, config)
        self.problem_ = problem
        self.members_ = result.members
        self.mean_ = result.empirical_mean
        self.cov_ = result.empirical_cov
        self.inflation_ = result.inflation
        self.n_features_in_ = d
        return self


class RffGpRegressor(BaseEstimator, RegressorMixin):
    """Random-feature GP regressor with pluggable uncertainty methods.

    method "exact" stores the conjugate weight posterior; "mp" runs an
    ensemble of append-and-refit chains; "anchored" runs an ensemble of
    ridge fits pulled toward independent prior draws. Chain defaults
    follow a 5-percent batch schedule (delta_n = max(1, round(0.05 n)))
    with horizon six times the sample size.

    Parameters mirror the functional layer: num_features and bandwidth
    define the kernel; noise_var the Gaussian likelihood; x_mode/x_lo/
    x_hi steer the synthetic-input sampler ("uniform" over the data
    range when bounds are omitted, or "empirical" resampling).
    """

    def __init__(
        self,
        num_features: int = 400,
        bandwidth: float = 1.0,
        noise_var: float = 0.64,
        method: str = "mp",
        delta_n: int | None = None,
        cap_n: int | None = None,
        k: int = 100,
        x_mode: str = "uniform",
        x_lo: float | None = None,
        x_hi: float | None = None,
        ridge_scale: float | None = None,
        seed: int = 0,
    ):
        self.num_features = num_features
        self.bandwidth = bandwidth
        self.noise_var = noise_var
        self.method = method
        self.delta_n = delta_n
        self.cap_n = cap_n
        self.k = k
        self.x_mode = x_mode
        self.x_lo = x_lo
        self.x_hi = x_hi
        self.ridge_scale = ridge_scale
        self.seed = seed

    def _model(self, d: int) -> gpmod.GpModel:
        kernel = gpmod.RffKernel(
            input_dim=d,
            num_features=self.num_features,
            bandwidth=self.bandwidth,
            rng=rng_for(self.seed, -2),
        )
        return gpmod.GpModel(kernel=kernel, noise_var=self.noise_var)

    def fit(self, X, y):
        X = check_array(X, ensure_2d=True, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64).ravel()
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        n = X.shape[0]
        model = self._model(X.shape[1])
        self.model_ = model
        self.X_ = X
        self.y_ = y
        self.n_features_in_ = X.shape[1]
        if self.method == "exact":
            self.weight_posterior_ = gpmod.exact_weight_posterior(model, X, y)
            self.inflation_ = 1.0
            return self
        if self.method == "mp":
            lo = float(X.min()) if self.x_lo is None else self.x_lo
            hi = float(X.max()) if self.x_hi is None else self.x_hi
            handle = gpmod.gp_handle(
                model, x_mode=self.x_mode, lo=lo, hi=hi, ridge_scale=self.ridge_scale
            )
            delta = self.delta_n if self.delta_n is not None else max(1, round(0.05 * n))
            config = MpRunConfig(
                n=n,
                delta_n=delta,
                cap_n=self.cap_n if self.cap_n is not None else 6 * n,
                k=self.k,
                seed=self.seed,
            )
            result = run_ensemble(handle, (X, y), config)
        elif self.method == "anchored":
            result = init_ensemble(
                gpmod.anchored_map_handle(model), (X, y), self.k, self.seed
            )
        else:
            raise ConfigError(f"unknown method {self.method!r}")
        self.members_ = result.members
        self.inflation_ = result.inflation
        self.degenerate_ = result.degenerate
        return self

    def _member_curves(self, X) -> np.ndarray:
        Phi = self.model_.kernel.feature_map(X)
        return self.members_ @ Phi.T

    def predict(self, X, return_std: bool = False):
        check_is_fitted(self, "model_")
        X = check_array(X, ensure_2d=True, dtype=np.float64)
        if self.method == "exact":
            mean, var = gpmod.exact_posterior(self.model_, self.X_, self.y_, X)
            return (mean, np.sqrt(var)) if return_std else mean
        curves = self._member_curves(X)
        mean = curves.mean(axis=0)
        if not return_std:
            return mean
        std = curves.std(axis=0, ddof=1) * np.sqrt(self.inflation_)
        return mean, std

    def credible_intervals(self, X, level: float = 0.8):
        """Pointwise central intervals; (lo, hi) arrays over query rows.

        Exact method: Gaussian quantiles of the closed-form posterior.
        Ensemble methods: member-curve quantiles, widened by the square
        root of the inflation factor about the ensemble mean.
        """
        check_is_fitted(self, "model_")
        X = check_array(X, ensure_2d=True, dtype=np.float64)
        if self.method == "exact":
            mean, var = gpmod.exact_posterior(self.model_, self.X_, self.y_, X)
            ivs = [
                gaussian_interval(float(m), float(np.sqrt(v)), level)
                for m, v in zip(mean, var)
            ]
            return np.array([iv.lo for iv in ivs]), np.array([iv.hi for iv in ivs])
        curves = self._member_curves(X)
        tail = (1.0 - level) / 2.0
        lo, hi = np.quantile(curves, [tail, 1.0 - tail], axis=0)
        center = curves.mean(axis=0)
        scale = np.sqrt(self.inflation_)
        return center + (lo - center) * scale, center + (hi - center) * scale
