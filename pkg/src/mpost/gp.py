"""GP regression through random Fourier features.

A Matern-3/2 kernel is approximated by m random cosine features, so the
GP prior becomes a finite Gaussian prior N(0, I) on feature weights and
every posterior or refit below reduces to a quadratic solve in weight
space. The module provides the exact conjugate posterior, the anchored
chain refit (append one synthetic point, solve a small regularized
quadratic around the current anchor), the anchored-MAP ensemble
baseline, and the input samplers used to propose synthetic x locations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import as_float_matrix, check_positive, check_positive_int
from .engine import ChainDataset, EstimatorHandle
from .errors import ConfigError, NumericalWarning
from .summaries import GaussianSummary

__all__ = [
    "RffKernel",
    "GpModel",
    "feature_map",
    "exact_weight_posterior",
    "exact_posterior",
    "mp_refit",
    "synth_response",
    "x_sampler",
    "anchored_map",
    "gp_handle",
    "anchored_map_handle",
]

# Condition number beyond which normal-equation solves get a jitter.
COND_LIMIT = 1e12
JITTER = 1e-8


class RffKernel:
    """Random-feature approximation of a Matern-3/2 kernel.

    Frequencies are drawn once at construction from the kernel's spectral
    density, which for Matern-3/2 is a multivariate Student-t with 3
    degrees of freedom; the bandwidth rescaling is applied inside the
    feature map. The map is phi(x) = sqrt(2/m) cos(freq x / bandwidth +
    phase), so phi(x).phi(x') estimates k(x, x') with k(x, x) = 1.

    Args:
        input_dim: dimension of the input space.
        num_features: number of cosine features m.
        bandwidth: kernel lengthscale, > 0.
        rng: Generator (or integer seed) fixing the random features.
    """

    def __init__(
        self,
        input_dim: int,
        num_features: int = 400,
        bandwidth: float = 1.0,
        rng: np.random.Generator | int | None = None,
    ):
        self.input_dim = check_positive_int(input_dim, "input_dim")
        self.num_features = check_positive_int(num_features, "num_features")
        self.bandwidth = check_positive(bandwidth, "bandwidth")
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        normals = rng.standard_normal((self.num_features, self.input_dim))
        chi = rng.chisquare(3.0, size=(self.num_features, 1))
        self.frequencies = normals / np.sqrt(chi / 3.0)
        self.phases = rng.uniform(0.0, 2.0 * np.pi, size=self.num_features)

    def feature_map(self, x) -> np.ndarray:
        """Map inputs to feature space.

        Accepts a single input of shape (input_dim,) returning (m,), or a
        batch (k, input_dim) returning (k, m). Each feature vector has
        squared norm at most 2.
        """
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        x2 = np.atleast_2d(x)
        if x2.shape[1] != self.input_dim:
            raise ValueError(
                f"inputs have {x2.shape[1]} coordinates, expected {self.input_dim}"
            )
        proj = x2 @ (self.frequencies.T / self.bandwidth) + self.phases
        out = np.sqrt(2.0 / self.num_features) * np.cos(proj)
        return out[0] if single else out


def feature_map(kernel: RffKernel, x) -> np.ndarray:
    return kernel.feature_map(x)


@dataclass(frozen=True)
class GpModel:
    """Random-feature GP with Gaussian observation noise."""

    kernel: RffKernel
    noise_var: float

    def __post_init__(self):
        check_positive(self.noise_var, "noise_var")


def _solve_spd(A: np.ndarray, b: np.ndarray, label: str) -> np.ndarray:
    """Solve A x = b for SPD-by-construction A, adding jitter when the
    conditioning is beyond rescue and warning about it."""
    if np.linalg.cond(A) > COND_LIMIT:
        warnings.warn(
            f"{label}: normal equations ill-conditioned; adding {JITTER} jitter",
            NumericalWarning,
            stacklevel=3,
        )
        A = A + JITTER * np.eye(A.shape[0])
    return np.linalg.solve(A, b)


def _stack_inputs(kernel: RffKernel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.size == 0:
        return np.empty((0, kernel.input_dim))
    if X.ndim == 1:
        X = X[:, None] if kernel.input_dim == 1 else X[None, :]
    return as_float_matrix(X, "X")


def exact_weight_posterior(model: GpModel, X, Y) -> GaussianSummary:
    """Conjugate posterior over feature weights given (X, Y).

    Prior theta ~ N(0, I); likelihood y = phi(x).theta + N(0, noise_var).
    With no data this returns the prior. The posterior precision is
    Phi'Phi / noise_var + I.
    """
    X = _stack_inputs(model.kernel, X)
    Y = np.asarray(Y, dtype=np.float64).ravel()
    if X.shape[0] != Y.shape[0]:
        raise ValueError(f"got {X.shape[0]} inputs but {Y.shape[0]} responses")
    m = model.kernel.num_features
    if X.shape[0] == 0:
        return GaussianSummary(np.zeros(m), np.eye(m), exact=True)
    Phi = model.kernel.feature_map(X)
    prec = Phi.T @ Phi / model.noise_var + np.eye(m)
    if np.linalg.cond(prec) > COND_LIMIT:
        warnings.warn(
            f"exact posterior: precision ill-conditioned; adding {JITTER} jitter",
            NumericalWarning,
            stacklevel=2,
        )
        prec = prec + JITTER * np.eye(m)
    cov = np.linalg.inv(prec)
    cov = 0.5 * (cov + cov.T)
    mean = cov @ (Phi.T @ Y) / model.noise_var
    return GaussianSummary(mean=mean, cov=cov, exact=True)


def exact_posterior(model: GpModel, X, Y, x_query) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise posterior mean and variance of f at the query inputs."""
    post = exact_weight_posterior(model, X, Y)
    Phi_q = np.atleast_2d(model.kernel.feature_map(np.asarray(x_query, dtype=np.float64)))
    mean = Phi_q @ post.mean
    var = np.einsum("ij,jk,ik->i", Phi_q, post.cov, Phi_q)
    return mean, np.maximum(var, 0.0)


def mp_refit(
    model: GpModel,
    anchor,
    X_all,
    x_new,
    y_new: float,
    n: int,
    ridge_scale: float | None = None,
) -> np.ndarray:
    """Refit after appending one synthetic observation.

    Minimizes, over theta,

        sum_{x in X_all} (f_anchor(x) - f_theta(x))^2
        + (f_theta(x_new) - y_new)^2
        + ridge * ||theta - anchor||^2

    where ridge defaults to 1/n. X_all is the full accumulated input set
    of the chain (real and synthetic), excluding x_new. The minimizer
    solves (Phi'Phi + phi phi' + ridge I) theta = Phi'Phi anchor +
    phi y_new + ridge anchor exactly.
    """
    n = check_positive_int(n, "n")
    ridge = 1.0 / n if ridge_scale is None else check_positive(ridge_scale, "ridge_scale")
    anchor = np.asarray(anchor, dtype=np.float64)
    m = model.kernel.num_features
    X_all = _stack_inputs(model.kernel, X_all)
    Phi = model.kernel.feature_map(X_all) if X_all.shape[0] else np.empty((0, m))
    phi = model.kernel.feature_map(np.asarray(x_new, dtype=np.float64).reshape(-1))
    G = Phi.T @ Phi
    A = G + np.outer(phi, phi) + ridge * np.eye(m)
    b = G @ anchor + phi * float(y_new) + ridge * anchor
    return _solve_spd(A, b, "mp_refit")


def synth_response(model: GpModel, theta, x, rng: np.random.Generator):
    """Draw y = f_theta(x) + noise; float for a single x, array for a batch."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = model.kernel.feature_map(np.asarray(x, dtype=np.float64))
    f = phi @ theta
    noise = rng.standard_normal(size=np.shape(f)) * np.sqrt(model.noise_var)
    out = f + noise
    return float(out) if np.ndim(out) == 0 else out


def x_sampler(
    mode: str,
    history,
    rng: np.random.Generator,
    lo=None,
    hi=None,
    size: int | None = None,
):
    """Propose synthetic input locations.

    Args:
        mode: "uniform" (iid uniform on the box [lo, hi]) or "empirical"
            (uniform over the history multiset of real plus past
            synthetic inputs).
        history: (k, d_x) array of inputs seen so far; required nonempty
            for "empirical".
        lo, hi: box bounds for "uniform", scalars or length-d_x vectors.

    Returns one input row (d_x,), or (size, d_x) when size is given.
    """
    n_draw = 1 if size is None else int(size)
    if mode == "uniform":
        if lo is None or hi is None:
            raise ConfigError("uniform input sampling requires lo and hi bounds")
        lo = np.atleast_1d(np.asarray(lo, dtype=np.float64))
        hi = np.atleast_1d(np.asarray(hi, dtype=np.float64))
        if np.any(hi <= lo):
            raise ConfigError("uniform input bounds must satisfy lo < hi")
        out = rng.uniform(lo, hi, size=(n_draw, lo.shape[0]))
    elif mode == "empirical":
        history = np.asarray(history, dtype=np.float64)
        if history.size == 0:
            raise ConfigError(
                "empirical input sampling requires a nonempty input history"
            )
        history = np.atleast_2d(history.reshape(history.shape[0], -1))
        idx = rng.integers(0, history.shape[0], size=n_draw)
        out = history[idx]
    else:
        raise ConfigError(f"unknown input sampler mode {mode!r}")
    return out[0] if size is None else out


def anchored_map(
    model: GpModel,
    X,
    Y,
    rng: np.random.Generator | None = None,
    anchor_weights=None,
) -> np.ndarray:
    """One member of the anchored-MAP ensemble.

    Minimizes sum_i (f_theta(x_i) - y_i)^2 + (noise_var / n)
    ||theta - theta0||^2 where theta0 is drawn from the N(0, I) weight
    prior (pass anchor_weights to fix it). With theta0 = 0 this is the
    standard MAP/ridge point estimate.
    """
    X = _stack_inputs(model.kernel, X)
    Y = np.asarray(Y, dtype=np.float64).ravel()
    n = X.shape[0]
    if n < 1:
        raise ValueError("anchored MAP requires at least one observation")
    if X.shape[0] != Y.shape[0]:
        raise ValueError(f"got {X.shape[0]} inputs but {Y.shape[0]} responses")
    m = model.kernel.num_features
    if anchor_weights is None:
        if rng is None:
            raise ValueError("provide rng to draw the anchor, or pass anchor_weights")
        theta0 = rng.standard_normal(m)
    else:
        theta0 = np.asarray(anchor_weights, dtype=np.float64)
    ridge = model.noise_var / n
    Phi = model.kernel.feature_map(X)
    A = Phi.T @ Phi + ridge * np.eye(m)
    b = Phi.T @ Y + ridge * theta0
    return _solve_spd(A, b, "anchored_map")


# How many rank-one chain updates may accumulate before the cached
# inverse is refactored from the exact Gram matrix.
_REFACTOR_EVERY = 64


def gp_handle(
    model: GpModel,
    x_mode: str = "uniform",
    lo=None,
    hi=None,
    ridge_scale: float | None = None,
    init_ridge_scale: float | None = None,
) -> EstimatorHandle:
    """Chain plug-in for random-feature GP regression.

    The real dataset is a pair (X, Y). The initial fit solves the
    randomized MAP problem: data misfit plus init_ridge * ||theta -
    theta0||^2 with theta0 drawn from the N(0, I) weight prior, so the
    chain keeps its initialization randomness and the across-chain mean
    starts at the exact posterior mean. init_ridge defaults to the noise
    variance (the weight the posterior mode itself uses); refits use the
    update rule's own anchoring weight, ridge_scale (default 1/n). Each
    refit folds the new synthetic points in one at a time through the
    same anchored quadratic as :func:`mp_refit`, using a rank-one update
    of the cached inverse normal matrix; the inverse is refactored from
    the exact Gram matrix every few dozen updates to stop error
    accumulation. Synthetic inputs come from :func:`x_sampler` in the
    given mode, with the history growing as the chain appends points.
    """
    if x_mode == "uniform" and (lo is None or hi is None):
        raise ConfigError("uniform input sampling requires lo and hi bounds")
    m = model.kernel.num_features

    def init_fit(ds: ChainDataset, rng: np.random.Generator) -> np.ndarray:
        X, Y = ds.real
        X = _stack_inputs(model.kernel, X)
        Y = np.asarray(Y, dtype=np.float64).ravel()
        n = X.shape[0]
        if n < 1:
            raise ValueError("the chain needs at least one real observation")
        ridge = 1.0 / n if ridge_scale is None else check_positive(ridge_scale, "ridge_scale")
        init_ridge = (
            model.noise_var
            if init_ridge_scale is None
            else check_positive(init_ridge_scale, "init_ridge_scale")
        )
        Phi = model.kernel.feature_map(X)
        G = Phi.T @ Phi
        theta0 = rng.standard_normal(m)
        theta = _solve_spd(
            G + init_ridge * np.eye(m), Phi.T @ Y + init_ridge * theta0, "gp init fit"
        )
        ds.cache.update(
            ridge=ridge,
            gram=G,
            inv=np.linalg.inv(G + ridge * np.eye(m)),
            hist=[row for row in X],
            pending=0,
        )
        return theta

    def synth_gen(
        theta: np.ndarray, count: int, rng: np.random.Generator, ds: ChainDataset
    ) -> tuple[np.ndarray, np.ndarray]:
        hist = ds.cache["hist"]
        xs = []
        for _ in range(count):
            x = x_sampler(x_mode, np.asarray(hist), rng, lo=lo, hi=hi)
            hist.append(x)
            xs.append(x)
        X_new = np.stack(xs)
        Y_new = np.atleast_1d(synth_response(model, theta, X_new, rng))
        return X_new, Y_new

    def refit(
        ds: ChainDataset, anchor: np.ndarray, rng: np.random.Generator
    ) -> np.ndarray:
        X_new, Y_new = ds.new
        theta = np.asarray(anchor, dtype=np.float64)
        G = ds.cache["gram"]
        Binv = ds.cache["inv"]
        for x, y in zip(model.kernel.feature_map(X_new), Y_new):
            # Solve (B + phi phi') theta' = B anchor + phi y via
            # Sherman-Morrison, with B = gram + ridge I at this point.
            u = Binv @ x
            denom = 1.0 + x @ u
            theta = theta + u * ((y - x @ theta) / denom)
            Binv -= np.outer(u, u / denom)
            G += np.outer(x, x)
            ds.cache["pending"] += 1
        if ds.cache["pending"] >= _REFACTOR_EVERY:
            ds.cache["inv"] = np.linalg.inv(G + ds.cache["ridge"] * np.eye(m))
            ds.cache["pending"] = 0
        return theta

    def data_size(data) -> int:
        return np.asarray(data[0]).shape[0]

    def take(data, idx: np.ndarray):
        X, Y = data
        X = np.asarray(X)
        Y = np.asarray(Y)
        return X[idx], Y[idx]

    return EstimatorHandle(
        init_fit=init_fit,
        refit=refit,
        synth_gen=synth_gen,
        data_size=data_size,
        take=take,
        init_randomness=True,
    )


def anchored_map_handle(model: GpModel) -> EstimatorHandle:
    """Plug-in whose initial fit is one anchored-MAP draw.

    Meant for init-randomness ensembles: each replicate re-fits the same
    data pulled toward an independent prior draw. The synthetic-phase
    hooks are inherited from the chain handle but unused there.
    """
    base = gp_handle(model, x_mode="empirical")

    def init_fit(ds: ChainDataset, rng: np.random.Generator) -> np.ndarray:
        X, Y = ds.real
        return anchored_map(model, X, Y, rng=rng)

    return EstimatorHandle(
        init_fit=init_fit,
        refit=base.refit,
        synth_gen=base.synth_gen,
        data_size=base.data_size,
        take=base.take,
        init_randomness=True,
    )
