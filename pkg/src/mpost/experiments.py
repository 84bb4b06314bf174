"""Experiment registry: reproducible desk-scale studies over the core.

Each experiment takes a validated parameter dict plus a base seed and
returns result rows (one metric value per row, with a standard error
where the value is a Monte Carlo estimate). Configuration is strict:
unknown keys are rejected, values are type-checked, and the chain
geometry is validated before any computation.
"""

from __future__ import annotations

import math
from itertools import product
from typing import Any, Callable

import numpy as np
from scipy.stats import norm

from .baselines import (
    RareCategoryModel,
    init_ensemble,
    nonparametric_bootstrap,
    parametric_bootstrap,
)
from .engine import MpRunConfig, inflation_factor, run_ensemble
from .errors import ConfigError
from .expfam import (
    ConjugatePrior,
    ExpFamilyModel,
    ExpFamilyTask,
    conjugate_posterior,
    gaussian_seq_mle_ensemble,
    radius_closed_form,
    seq_mle_handle,
)
from .gp import (
    GpModel,
    RffKernel,
    anchored_map_handle,
    exact_posterior,
    gp_handle,
)
from .lingauss import (
    SpectralProblem,
    lg_bayes_error,
    lg_fast_ensemble,
    lg_handle,
    lg_posterior,
    lg_sample,
)
from .metrics import enlarged_coverage, excess_mc, w2_gaussian
from .seeds import rng_for, substream

__all__ = ["EXPERIMENTS", "SCHEMAS", "resolve_config", "run_experiment"]


# -- configuration ------------------------------------------------------

SCHEMAS: dict[str, dict[str, Any]] = {
    "expfam_w2": {
        "n_values": [10, 20, 40],
        "dim": 5,
        "prior_strength": 1.0,
        "tasks": 200,
        "k": 2000,
        "delta_n": 1,
        "cap_mult": 200,
    },
    "lingauss_w2": {
        "dim": 20,
        "beta": 1.0,
        "alpha_norm": 1.0,
        "n": 10,
        "delta_n": 1,
        "cap_n": 2000,
        "k": 2000,
    },
    "gp_toy": {
        "n": 30,
        "num_features": 400,
        "bandwidth": 1.0,
        "noise_var": 0.64,
        "ridge_scale": 0.64,
        "delta_n": 2,
        "cap_n": 180,
        "k": 100,
        "level": 0.8,
        "grid_points": 20,
        "x_lo": 0.0,
        "x_hi": 6.0,
    },
    "nullspace": {
        "dim": 50,
        "n": 10,
        "delta_n": 1,
        "cap_mult": 100,
        "k": 500,
        "directions": 40,
    },
    "rare_category": {
        "gate_eps": 0.01,
        "n": 50,
        "delta_n": 1,
        "cap_n": 1000,
        "k": 2000,
    },
    "inflation_check": {
        "n": 100,
        "delta_n_values": [1, 25],
        "cap_n_values": [400, 10000],
        "k": 4000,
    },
    "excess_bound": {
        "dim": 2,
        "prior_strength": 1.0,
        "j_values": [5, 10, 50],
        "mc_reps": 10000,
    },
    "enlarged_set": {
        "n": 20,
        "delta_n": 1,
        "cap_n": 2000,
        "k": 4000,
        "gammas": [0.1, 0.2],
        "delta_mults": [2.0, 5.0],
        "mc_reps": 10000,
    },
}


def _check_value(experiment: str, key: str, default: Any, value: Any) -> Any:
    if isinstance(default, bool) or isinstance(value, bool):
        raise ConfigError(f"{experiment}: field {key!r} has no boolean form")
    if isinstance(default, int):
        if not isinstance(value, int):
            raise ConfigError(
                f"{experiment}: field {key!r} must be an integer, got {value!r}"
            )
        return value
    if isinstance(default, float):
        if not isinstance(value, (int, float)):
            raise ConfigError(
                f"{experiment}: field {key!r} must be a number, got {value!r}"
            )
        return float(value)
    if isinstance(default, list):
        if not isinstance(value, list) or not value:
            raise ConfigError(
                f"{experiment}: field {key!r} must be a nonempty list, got {value!r}"
            )
        elem = default[0]
        return [_check_value(experiment, f"{key}[]", elem, v) for v in value]
    raise ConfigError(f"{experiment}: field {key!r} has unsupported schema type")


def resolve_config(experiment: str, overrides: dict | None = None) -> dict:
    """Merge user overrides into the experiment's schema defaults.

    Unknown keys and wrongly typed values raise ConfigError naming the
    field. The resolved dict is what a run records in its manifest.
    """
    if experiment not in SCHEMAS:
        known = ", ".join(sorted(SCHEMAS))
        raise ConfigError(f"unknown experiment {experiment!r}; known: {known}")
    schema = SCHEMAS[experiment]
    resolved = {k: (list(v) if isinstance(v, list) else v) for k, v in schema.items()}
    for key, value in (overrides or {}).items():
        if key == "experiment":
            if value != experiment:
                raise ConfigError(
                    f"config names experiment {value!r} but {experiment!r} was requested"
                )
            continue
        if key not in schema:
            raise ConfigError(f"{experiment}: unknown config field {key!r}")
        resolved[key] = _check_value(experiment, key, schema[key], value)
    _validate_geometry(experiment, resolved)
    return resolved


def _validate_geometry(experiment: str, params: dict) -> None:
    """Instantiate the run geometry early so bad configs fail in
    validate, not mid-run."""
    if experiment in ("lingauss_w2", "gp_toy", "rare_category", "enlarged_set"):
        MpRunConfig(
            n=params["n"],
            delta_n=params["delta_n"],
            cap_n=params["cap_n"],
            k=params["k"],
            seed=0,
        )
    elif experiment == "expfam_w2":
        for n in params["n_values"]:
            MpRunConfig(
                n=n,
                delta_n=params["delta_n"],
                cap_n=params["cap_mult"] * n,
                k=params["k"],
                seed=0,
            )
    elif experiment == "nullspace":
        MpRunConfig(
            n=params["n"],
            delta_n=params["delta_n"],
            cap_n=params["cap_mult"] * params["n"],
            k=params["k"],
            seed=0,
        )
    elif experiment == "inflation_check":
        for dn, N in product(params["delta_n_values"], params["cap_n_values"]):
            MpRunConfig(n=params["n"], delta_n=dn, cap_n=N, k=params["k"], seed=0)


def _dump(dump: list | None, name: str, members: np.ndarray) -> None:
    """Collect raw ensemble members for the optional samples dump."""
    if dump is not None:
        dump.append((name, np.asarray(members, dtype=np.float64)))


def _row(
    experiment: str,
    metric: str,
    value: float,
    std_error: float = 0.0,
    index: int | None = None,
    n: int | None = None,
    delta_n: int | None = None,
    cap_n: int | None = None,
    k: int | None = None,
) -> dict:
    return {
        "experiment": experiment,
        "n": n,
        "delta_n": delta_n,
        "cap_n": cap_n,
        "k": k,
        "metric": metric,
        "index": index,
        "value": float(value),
        "std_error": float(std_error),
    }


# -- experiment bodies --------------------------------------------------


def _run_expfam_w2(params: dict, seed: int, dump: list | None = None) -> list[dict]:
    """Ratio of the chain-ensemble-to-posterior W2^2 to the posterior
    radius, averaged over prior-drawn tasks, for several sample sizes."""
    d = params["dim"]
    alpha = params["prior_strength"]
    model = ExpFamilyModel("gaussian", d)
    prior = ConjugatePrior(alpha, np.zeros(d))
    rows = []
    for n in params["n_values"]:
        cap_n = params["cap_mult"] * n
        eps2 = radius_closed_form(model, prior, n)
        ratios = np.empty(params["tasks"])
        for t in range(params["tasks"]):
            rng = rng_for(seed, n, t, 0)
            theta0 = rng.standard_normal(d) / math.sqrt(alpha)
            data = theta0 + rng.standard_normal((n, d))
            config = MpRunConfig(
                n=n,
                delta_n=params["delta_n"],
                cap_n=cap_n,
                k=params["k"],
                seed=substream(seed, n, t, 1),
            )
            ens = gaussian_seq_mle_ensemble(model, data, config)
            post = conjugate_posterior(model, prior, data).gaussian_summary()
            w2 = w2_gaussian(ens.empirical_mean, ens.empirical_cov, post.mean, post.cov)
            ratios[t] = w2 / eps2
        se = float(ratios.std(ddof=1) / math.sqrt(len(ratios)))
        common = dict(n=n, delta_n=params["delta_n"], cap_n=cap_n, k=params["k"])
        rows.append(_row("expfam_w2", "w2_over_radius", ratios.mean(), se, **common))
        rows.append(_row("expfam_w2", "radius_sq", eps2, 0.0, **common))
    return rows


def _run_lingauss_w2(params: dict, seed: int, dump: list | None = None) -> list[dict]:
    """Weighted W2^2 between the spectral chain ensemble and the exact
    posterior, against the posterior radius."""
    problem = SpectralProblem(
        dim=params["dim"], beta=params["beta"], alpha_norm=params["alpha_norm"]
    )
    n = params["n"]
    rng = rng_for(seed, 0)
    theta0 = rng.standard_normal(problem.dim)
    data = lg_sample(problem, theta0, rng, size=n)
    config = MpRunConfig(
        n=n,
        delta_n=params["delta_n"],
        cap_n=params["cap_n"],
        k=params["k"],
        seed=substream(seed, 1),
    )
    if params["delta_n"] == 1:
        ens = lg_fast_ensemble(problem, data, config)
    else:
        ens = run_ensemble(lg_handle(problem), data, config)
    _dump(dump, "mp", ens.members)
    post = lg_posterior(problem, data)
    w = problem.norm_weights
    w2 = w2_gaussian(
        ens.empirical_mean * w,
        ens.empirical_cov * np.outer(w, w),
        post.mean * w,
        post.cov * np.outer(w, w),
    )
    eps2 = lg_bayes_error(problem, n)
    common = dict(
        n=n, delta_n=params["delta_n"], cap_n=params["cap_n"], k=params["k"]
    )
    return [
        _row("lingauss_w2", "w2_sq_weighted", w2, 0.0, **common),
        _row("lingauss_w2", "radius_sq", eps2, 0.0, **common),
        _row("lingauss_w2", "w2_over_radius", w2 / eps2, 0.0, **common),
    ]


def gapped_dataset(n: int, rng: np.random.Generator, lo: float = 0.0, hi: float = 6.0):
    """Synthetic 1-D regression sample with a hole in the input range.

    Inputs land uniformly in the outer 40/25 percent bands of [lo, hi]
    (nothing in the middle), targets are a sine plus a mild trend with
    noise standard deviation 0.8.
    """
    span = hi - lo
    left = rng.uniform(lo, lo + 0.4 * span, size=n)
    right = rng.uniform(hi - 0.25 * span, hi, size=n)
    pick = rng.random(n) < 0.6
    x = np.where(pick, left, right)
    y = np.sin(2.0 * x) + 0.25 * x + 0.8 * rng.standard_normal(n)
    return x[:, None], y


def _interval_rows(curves: np.ndarray, level: float, inflation: float):
    """Pointwise central interval endpoints from member curves.

    Members are Gaussian by construction here (linear chain dynamics,
    Gaussian innovations), so mean +- z * sd is used rather than raw
    quantiles, with the sd widened by the root of the covariance
    inflation.
    """
    z = float(norm.ppf(0.5 + level / 2.0))
    center = curves.mean(axis=0)
    half = z * curves.std(axis=0, ddof=1) * math.sqrt(inflation)
    return center - half, center + half


def _run_gp_toy(params: dict, seed: int, dump: list | None = None) -> list[dict]:
    """Pointwise 80 percent intervals of the chain ensemble versus the
    exact random-feature posterior and the anchored-MAP ensemble on a
    gapped 1-D dataset."""
    n = params["n"]
    level = params["level"]
    rng = rng_for(seed, 0)
    X, Y = gapped_dataset(n, rng, lo=params["x_lo"], hi=params["x_hi"])
    kernel = RffKernel(
        input_dim=1,
        num_features=params["num_features"],
        bandwidth=params["bandwidth"],
        rng=rng_for(seed, 1),
    )
    model = GpModel(kernel=kernel, noise_var=params["noise_var"])
    # in-sample grid: actual training inputs spread evenly by rank, so no
    # evaluation point can fall inside the input gap
    order = np.sort(X[:, 0])
    picks = np.round(np.linspace(0, n - 1, params["grid_points"])).astype(int)
    grid = order[picks]
    grid_X = grid[:, None]
    Phi_grid = kernel.feature_map(grid_X)

    mean, var = exact_posterior(model, X, Y, grid_X)
    z = float(norm.ppf(0.5 + level / 2.0))
    exact_lo = mean - z * np.sqrt(var)
    exact_hi = mean + z * np.sqrt(var)

    def chain_endpoints(mode: str, stream: int):
        config = MpRunConfig(
            n=n,
            delta_n=params["delta_n"],
            cap_n=params["cap_n"],
            k=params["k"],
            seed=substream(seed, stream),
        )
        handle = gp_handle(
            model,
            x_mode=mode,
            lo=params["x_lo"],
            hi=params["x_hi"],
            ridge_scale=params["ridge_scale"],
        )
        ens = run_ensemble(handle, (X, Y), config)
        _dump(dump, f"mp_{mode}", ens.members)
        curves = ens.members @ Phi_grid.T
        # the truncation correction models a contracting recursion; this
        # chain replays its own predictions and never contracts, so the
        # raw ensemble spread is already the full-horizon spread
        return _interval_rows(curves, level, 1.0)

    mp_lo, mp_hi = chain_endpoints("uniform", 2)
    alt_lo, alt_hi = chain_endpoints("empirical", 3)
    anchored = init_ensemble(
        anchored_map_handle(model), (X, Y), params["k"], substream(seed, 4)
    )
    _dump(dump, "anchored", anchored.members)
    an_curves = anchored.members @ Phi_grid.T
    an_lo, an_hi = _interval_rows(an_curves, level, 1.0)

    common = dict(
        n=n, delta_n=params["delta_n"], cap_n=params["cap_n"], k=params["k"]
    )
    rows = []
    series = {
        "x": grid,
        "exact_lo": exact_lo,
        "exact_hi": exact_hi,
        "mp_lo": mp_lo,
        "mp_hi": mp_hi,
        "mp_alt_lo": alt_lo,
        "mp_alt_hi": alt_hi,
        "anchored_lo": an_lo,
        "anchored_hi": an_hi,
    }
    for name, values in series.items():
        for i, v in enumerate(values):
            rows.append(_row("gp_toy", name, v, 0.0, index=i, **common))

    w_exact = exact_hi - exact_lo
    w_mp = mp_hi - mp_lo
    w_alt = alt_hi - alt_lo
    w_an = an_hi - an_lo
    rows.append(
        _row("gp_toy", "max_rel_width_dev", np.max(np.abs(w_mp - w_exact) / w_exact), 0.0, **common)
    )
    endpoint_dev = np.maximum(np.abs(mp_lo - exact_lo), np.abs(mp_hi - exact_hi))
    rows.append(
        _row("gp_toy", "max_rel_endpoint_dev", np.max(endpoint_dev / w_exact), 0.0, **common)
    )
    rows.append(_row("gp_toy", "mean_width_exact", w_exact.mean(), 0.0, **common))
    rows.append(_row("gp_toy", "mean_width_mp", w_mp.mean(), 0.0, **common))
    rows.append(_row("gp_toy", "mean_width_mp_alt", w_alt.mean(), 0.0, **common))
    rows.append(_row("gp_toy", "mean_width_anchored", w_an.mean(), 0.0, **common))
    rows.append(
        _row(
            "gp_toy",
            "sampler_rel_dev",
            abs(w_mp.mean() - w_alt.mean()) / w_mp.mean(),
            0.0,
            **common,
        )
    )
    return rows


def _run_nullspace(params: dict, seed: int, dump: list | None = None) -> list[dict]:
    """Ensemble variance along directions orthogonal to the centered
    data span: chain versus nonparametric bootstrap."""
    d = params["dim"]
    n = params["n"]
    cap_n = params["cap_mult"] * n
    model = ExpFamilyModel("gaussian", d)
    rng = rng_for(seed, 0)
    theta0 = rng.standard_normal(d)
    data = theta0 + rng.standard_normal((n, d))

    centered = data - data.mean(axis=0)
    _, svals, vt = np.linalg.svd(centered, full_matrices=True)
    rank = int(np.sum(svals > 1e-10 * svals[0]))
    avail = d - rank
    if avail < params["directions"]:
        raise ConfigError(
            f"only {avail} null directions available, {params['directions']} requested"
        )
    null_dirs = vt[rank : rank + params["directions"]]

    config = MpRunConfig(
        n=n, delta_n=params["delta_n"], cap_n=cap_n, k=params["k"],
        seed=substream(seed, 1),
    )
    mp = gaussian_seq_mle_ensemble(model, data, config)
    bs = nonparametric_bootstrap(
        seq_mle_handle(model), data, params["k"], substream(seed, 2)
    )
    _dump(dump, "mp", mp.members)
    _dump(dump, "bootstrap", bs.members)

    # Chain variance along any unit direction is predicted by the
    # truncation rule; report it raw and normalized by the prediction.
    predicted = 1.0 / (n + config.delta_n) - 1.0 / (cap_n + config.delta_n)
    common = dict(n=n, delta_n=params["delta_n"], cap_n=cap_n, k=params["k"])
    rows = [_row("nullspace", "predicted_var", predicted, 0.0, **common)]
    for i, u in enumerate(null_dirs):
        mp_raw = float(np.var(mp.members @ u, ddof=1))
        bs_raw = float(np.var(bs.members @ u, ddof=1))
        rows.append(_row("nullspace", "mp_var_raw", mp_raw, 0.0, index=i, **common))
        rows.append(
            _row("nullspace", "mp_var", mp_raw / predicted, 0.0, index=i, **common)
        )
        rows.append(_row("nullspace", "bs_var", bs_raw, 0.0, index=i, **common))
    return rows


def _run_rare_category(params: dict, seed: int, dump: list | None = None) -> list[dict]:
    """Fraction of parametric-bootstrap replicates versus chains that
    never see the rare category."""
    rc = RareCategoryModel(gate_eps=params["gate_eps"])
    n = params["n"]
    k = params["k"]
    rng = rng_for(seed, 0)
    data = rc.sample(np.array([-1.0, 1.0]), rng, n)
    theta_init = rc.fit(data)

    pb = parametric_bootstrap(rc.handle(), data, k, substream(seed, 1))
    pb_missing = float(np.mean(pb.members[:, 0] == 0.0))

    config = MpRunConfig(
        n=n, delta_n=params["delta_n"], cap_n=params["cap_n"], k=k,
        seed=substream(seed, 2),
    )
    mp = run_ensemble(rc.handle(), data, config)
    _dump(dump, "pb", pb.members)
    _dump(dump, "mp", mp.members)
    mp_missing = float(np.mean(mp.members[:, 0] == theta_init[0]))

    exact_pb = (1.0 - params["gate_eps"]) ** n
    exact_mp = (1.0 - params["gate_eps"]) ** params["cap_n"]
    common = dict(n=n, delta_n=params["delta_n"], cap_n=params["cap_n"], k=k)
    se = lambda p: math.sqrt(max(p * (1.0 - p), 1e-12) / k)
    return [
        _row("rare_category", "pb_missing_fraction", pb_missing, se(pb_missing), **common),
        _row("rare_category", "pb_missing_exact", exact_pb, 0.0, **common),
        _row("rare_category", "mp_missing_fraction", mp_missing, se(mp_missing), **common),
        _row("rare_category", "mp_missing_exact", exact_mp, 0.0, **common),
    ]


def _run_inflation_check(params: dict, seed: int, dump: list | None = None) -> list[dict]:
    """Across-chain variance against the exact batched-truncation sum
    and its closed-form approximation, plus the inflation multiplier."""
    n = params["n"]
    model = ExpFamilyModel("gaussian", 1)
    data = rng_for(seed, 0).standard_normal((n, 1))
    rows = []
    for dn, N in product(params["delta_n_values"], params["cap_n_values"]):
        config = MpRunConfig(
            n=n, delta_n=dn, cap_n=N, k=params["k"], seed=substream(seed, dn, N)
        )
        ens = gaussian_seq_mle_ensemble(model, data, config)
        _dump(dump, f"mp_dn{dn}_N{N}", ens.members)
        var = float(ens.empirical_cov[0, 0])
        rounds = N // dn
        counts = n + dn * np.arange(1, rounds + 1, dtype=np.float64)
        exact_sum = float(np.sum(dn / counts**2))
        closed = 1.0 / (n + dn) - 1.0 / (N + dn)
        common = dict(n=n, delta_n=dn, cap_n=N, k=params["k"])
        var_se = var * math.sqrt(2.0 / (params["k"] - 1))
        rows.append(_row("inflation_check", "ensemble_var", var, var_se, **common))
        rows.append(_row("inflation_check", "exact_sum", exact_sum, 0.0, **common))
        rows.append(_row("inflation_check", "closed_form", closed, 0.0, **common))
        rows.append(
            _row(
                "inflation_check",
                "rel_err_exact",
                abs(var - exact_sum) / exact_sum,
                0.0,
                **common,
            )
        )
        rows.append(
            _row(
                "inflation_check",
                "rel_err_closed",
                abs(var - closed) / closed,
                0.0,
                **common,
            )
        )
        rows.append(
            _row(
                "inflation_check",
                "closed_vs_exact_gap",
                abs(exact_sum - closed) / exact_sum,
                0.0,
                **common,
            )
        )
    rows.append(
        _row(
            "inflation_check",
            "inflation_factor",
            inflation_factor(100, 25, 400),
            0.0,
            n=100,
            delta_n=25,
            cap_n=400,
        )
    )
    return rows


def _run_excess_bound(params: dict, seed: int, dump: list | None = None) -> list[dict]:
    """Monte Carlo excess error of the running mean against the
    conjugate-posterior mean, with its theoretical ceiling."""
    d = params["dim"]
    alpha = params["prior_strength"]
    model = ExpFamilyModel("gaussian", d)
    prior = ConjugatePrior(alpha, np.zeros(d))
    task = ExpFamilyTask(model, prior)
    rows = []
    for j in params["j_values"]:
        est = excess_mc(
            task,
            lambda data: np.atleast_2d(data).mean(axis=0),
            j,
            params["mc_reps"],
            rng_for(seed, j),
        )
        bound = 2.0 * alpha / j * radius_closed_form(model, prior, j)
        common = dict(n=j, k=params["mc_reps"])
        rows.append(_row("excess_bound", "excess_sq", est.value, est.std_error, **common))
        rows.append(_row("excess_bound", "bound", bound, 0.0, **common))
        rows.append(
            _row("excess_bound", "margin", bound - est.value, est.std_error, **common)
        )
    return rows


def _run_enlarged_set(params: dict, seed: int, dump: list | None = None) -> list[dict]:
    """Posterior mass of delta-enlarged central chain intervals against
    the distance-based floor."""
    n = params["n"]
    model = ExpFamilyModel("gaussian", 1)
    prior = ConjugatePrior(1.0, np.zeros(1))
    rng = rng_for(seed, 0)
    theta0 = rng.standard_normal(1)
    data = theta0 + rng.standard_normal((n, 1))
    config = MpRunConfig(
        n=n, delta_n=params["delta_n"], cap_n=params["cap_n"], k=params["k"],
        seed=substream(seed, 1),
    )
    ens = gaussian_seq_mle_ensemble(model, data, config)
    _dump(dump, "mp", ens.members)
    post = conjugate_posterior(model, prior, data).gaussian_summary()
    w2_sq = w2_gaussian(ens.empirical_mean, ens.empirical_cov, post.mean, post.cov)
    w2 = math.sqrt(w2_sq)

    def posterior_sampler(r: np.random.Generator, size: int) -> np.ndarray:
        return post.sample(r, size=size)[:, 0]

    common = dict(n=n, delta_n=params["delta_n"], cap_n=params["cap_n"], k=params["k"])
    rows = [_row("enlarged_set", "w2", w2, 0.0, **common)]
    idx = 0
    for gamma in params["gammas"]:
        for mult in params["delta_mults"]:
            delta = mult * w2
            est = enlarged_coverage(
                ens.members[:, 0],
                posterior_sampler,
                gamma,
                delta,
                params["mc_reps"],
                rng_for(seed, 2, idx),
            )
            bound = 1.0 - gamma - 1.0 / mult**2
            rows.append(_row("enlarged_set", "gamma", gamma, 0.0, index=idx, **common))
            rows.append(
                _row("enlarged_set", "delta_mult", mult, 0.0, index=idx, **common)
            )
            rows.append(
                _row("enlarged_set", "rate", est.value, est.std_error, index=idx, **common)
            )
            rows.append(_row("enlarged_set", "bound", bound, 0.0, index=idx, **common))
            rows.append(
                _row(
                    "enlarged_set",
                    "slack",
                    est.value - bound,
                    est.std_error,
                    index=idx,
                    **common,
                )
            )
            idx += 1
    return rows


EXPERIMENTS: dict[str, Callable[[dict, int], list[dict]]] = {
    "expfam_w2": _run_expfam_w2,
    "lingauss_w2": _run_lingauss_w2,
    "gp_toy": _run_gp_toy,
    "nullspace": _run_nullspace,
    "rare_category": _run_rare_category,
    "inflation_check": _run_inflation_check,
    "excess_bound": _run_excess_bound,
    "enlarged_set": _run_enlarged_set,
}


def run_experiment(
    experiment: str, params: dict, seed: int, dump: list | None = None
) -> list[dict]:
    """Run a registered experiment on resolved parameters.

    When ``dump`` is a list, bodies with a single primary run append
    ``(ensemble_name, members)`` pairs to it for the raw-samples dump.
    """
    if experiment not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ConfigError(f"unknown experiment {experiment!r}; known: {known}")
    return EXPERIMENTS[experiment](params, seed, dump)
