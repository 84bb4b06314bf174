"""Uncertainty quantification by iterated synthetic-data refitting.

The core loop starts from a point fit on the observed sample, then
repeatedly draws synthetic batches from the current fit, appends them,
and refits. Running many independent chains yields a parameter ensemble
whose spread plays the role of a posterior. The package ships the chain
engine, closed-form reference posteriors for conjugate exponential
families, a diagonal linear-Gaussian sequence model, random-feature GP
regression, bootstrap baselines, transport/score metrics, scikit-learn
style estimators, and a reproducible experiment harness.
"""

from .baselines import (
    RareCategoryModel,
    init_ensemble,
    nonparametric_bootstrap,
    parametric_bootstrap,
)
from .engine import (
    EnsembleResult,
    EstimatorHandle,
    MpRunConfig,
    gd_step,
    inflation_factor,
    online_mp_step,
    run_ensemble,
    run_mp_chain,
    worker_count,
)
from .errors import ConfigError, NumericalError, NumericalWarning
from .estimators import ExpFamilyMpEnsemble, RffGpRegressor, SpectralMpEnsemble
from .expfam import (
    ConjugatePosterior,
    ConjugatePrior,
    ExpFamilyModel,
    ExpFamilyTask,
    conjugate_posterior,
    gaussian_seq_mle_ensemble,
    radius_closed_form,
    seq_mle_handle,
    seq_mle_update,
)
from .experiments import EXPERIMENTS, resolve_config, run_experiment
from .gp import (
    GpModel,
    RffKernel,
    anchored_map,
    anchored_map_handle,
    exact_posterior,
    exact_weight_posterior,
    gp_handle,
    mp_refit,
    synth_response,
    x_sampler,
)
from .lingauss import (
    SpectralProblem,
    SpectralTask,
    lg_bayes_error,
    lg_fast_ensemble,
    lg_handle,
    lg_posterior,
    lg_sample,
    lg_update,
)
from .metrics import (
    CredibleInterval,
    McEstimate,
    coverage,
    crps_ensemble,
    empirical_interval,
    enlarged_coverage,
    excess_mc,
    gaussian_interval,
    nlpd_gaussian_mixture,
    radius_mc,
    w2_empirical_1d,
    w2_gaussian,
)
from .seeds import rng_for, substream
from .summaries import GaussianSummary

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConjugatePosterior",
    "ConjugatePrior",
    "CredibleInterval",
    "EnsembleResult",
    "EstimatorHandle",
    "EXPERIMENTS",
    "ExpFamilyModel",
    "ExpFamilyMpEnsemble",
    "ExpFamilyTask",
    "GaussianSummary",
    "GpModel",
    "McEstimate",
    "MpRunConfig",
    "NumericalError",
    "NumericalWarning",
    "RareCategoryModel",
    "RffGpRegressor",
    "RffKernel",
    "SpectralMpEnsemble",
    "SpectralProblem",
    "SpectralTask",
    "anchored_map",
    "anchored_map_handle",
    "conjugate_posterior",
    "coverage",
    "crps_ensemble",
    "empirical_interval",
    "enlarged_coverage",
    "exact_posterior",
    "exact_weight_posterior",
    "excess_mc",
    "gaussian_interval",
    "gaussian_seq_mle_ensemble",
    "gd_step",
    "gp_handle",
    "inflation_factor",
    "init_ensemble",
    "lg_bayes_error",
    "lg_fast_ensemble",
    "lg_handle",
    "lg_posterior",
    "lg_sample",
    "lg_update",
    "mp_refit",
    "nlpd_gaussian_mixture",
    "nonparametric_bootstrap",
    "online_mp_step",
    "parametric_bootstrap",
    "radius_closed_form",
    "radius_mc",
    "resolve_config",
    "rng_for",
    "run_ensemble",
    "run_experiment",
    "run_mp_chain",
    "seq_mle_handle",
    "seq_mle_update",
    "substream",
    "synth_response",
    "w2_empirical_1d",
    "w2_gaussian",
    "worker_count",
    "x_sampler",
]
