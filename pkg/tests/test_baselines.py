import numpy as np
import pytest

from mpost.baselines import (
    RareCategoryModel,
    init_ensemble,
    nonparametric_bootstrap,
    parametric_bootstrap,
)
from mpost.engine import ChainDataset, EstimatorHandle, MpRunConfig, run_ensemble
from mpost.seeds import rng_for


def mean_handle(init_noise=0.0) -> EstimatorHandle:
    """Unit-variance Gaussian mean fit; optional initialization jitter."""

    def init_fit(ds, rng):
        theta = np.asarray(ds.real, dtype=np.float64).mean(axis=0)
        if init_noise:
            theta = theta + init_noise * rng.standard_normal(theta.shape)
        return theta

    def refit(ds, anchor, rng):
        raise AssertionError("baseline fits never warm-start")

    def synth_gen(theta, count, rng, ds):
        return theta[None, :] + rng.standard_normal((count, theta.shape[0]))

    return EstimatorHandle(
        init_fit=init_fit,
        refit=refit,
        synth_gen=synth_gen,
        init_randomness=bool(init_noise),
    )


def gaussian_data(n, seed=0):
    return rng_for(seed, 99).standard_normal((n, 1))


class TestParametricBootstrap:
    def test_replicate_moments(self):
        n, k = 40, 3000
        data = gaussian_data(n, seed=1)
        theta_hat = data.mean()
        pb = parametric_bootstrap(mean_handle(), data, k=k, seed=2)
        se = pb.members.std(ddof=1) / np.sqrt(k)
        assert abs(pb.empirical_mean[0] - theta_hat) < 4.0 * se
        assert pb.empirical_cov[0, 0] == pytest.approx(1.0 / n, rel=0.15)

    def test_deterministic(self):
        data = gaussian_data(10, seed=3)
        a = parametric_bootstrap(mean_handle(), data, k=8, seed=4)
        b = parametric_bootstrap(mean_handle(), data, k=8, seed=4)
        c = parametric_bootstrap(mean_handle(), data, k=8, seed=5)
        assert np.array_equal(a.members, b.members)
        assert not np.array_equal(a.members, c.members)

    def test_members_stable_under_k(self):
        # replicate i depends only on its own substream, so growing the
        # ensemble extends it without moving earlier members
        data = gaussian_data(10, seed=6)
        small = parametric_bootstrap(mean_handle(), data, k=5, seed=7)
        large = parametric_bootstrap(mean_handle(), data, k=10, seed=7)
        assert np.array_equal(large.members[:5], small.members)

    def test_k_validated(self):
        with pytest.raises(ValueError, match="k must"):
            parametric_bootstrap(mean_handle(), gaussian_data(5), k=0, seed=0)


class TestNonparametricBootstrap:
    def test_constant_data_collapses(self):
        data = np.full((12, 1), 3.25)
        nb = nonparametric_bootstrap(mean_handle(), data, k=20, seed=8)
        assert np.all(nb.members == 3.25)
        assert nb.empirical_cov[0, 0] == 0.0

    def test_replicate_moments(self):
        n, k = 40, 3000
        data = gaussian_data(n, seed=9)
        nb = nonparametric_bootstrap(mean_handle(), data, k=k, seed=10)
        plug_in_var = data.var() / n
        se = nb.members.std(ddof=1) / np.sqrt(k)
        assert abs(nb.empirical_mean[0] - data.mean()) < 4.0 * se
        assert nb.empirical_cov[0, 0] == pytest.approx(plug_in_var, rel=0.15)

    def test_deterministic(self):
        data = gaussian_data(10, seed=11)
        a = nonparametric_bootstrap(mean_handle(), data, k=6, seed=12)
        b = nonparametric_bootstrap(mean_handle(), data, k=6, seed=12)
        assert np.array_equal(a.members, b.members)

    def test_empty_data_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            nonparametric_bootstrap(mean_handle(), np.empty((0, 1)), k=3, seed=0)


class TestInitEnsemble:
    def test_deterministic_estimator_degenerates(self):
        data = gaussian_data(9, seed=13)
        ens = init_ensemble(mean_handle(), data, k=5, seed=14)
        assert ens.degenerate
        assert np.all(ens.members == ens.members[0])

    def test_randomized_estimator_spreads(self):
        data = gaussian_data(9, seed=15)
        ens = init_ensemble(mean_handle(init_noise=0.5), data, k=5, seed=16)
        assert not ens.degenerate
        assert np.unique(ens.members).size == 5


class TestRareCategoryModel:
    def test_parameter_validation(self):
        with pytest.raises(ValueError, match="gate_eps"):
            RareCategoryModel(gate_eps=0.0)
        with pytest.raises(ValueError, match="gate_eps"):
            RareCategoryModel(gate_eps=1.0)
        with pytest.raises(ValueError, match="ridge"):
            RareCategoryModel(ridge=0.0)

    def test_fit_oracle(self):
        model = RareCategoryModel()
        theta = model.fit([[1.0, 2.0], [1.0, 4.0]])
        assert theta[0] == 0.0
        assert theta[1] == pytest.approx(3.0, abs=1e-5)

    def test_absent_category_is_exactly_zero(self):
        model = RareCategoryModel()
        rows = np.column_stack([np.ones(50), rng_for(17, 0).standard_normal(50)])
        theta = model.fit(rows)
        assert theta[0] == 0.0
        # the fitted sampler can still regenerate the missing category
        synth = model.sample(theta, rng_for(18, 0), size=20_000)
        assert 0.0 < np.mean(synth[:, 0] == 0.0) < 0.05

    def test_sample_moments(self):
        model = RareCategoryModel(gate_eps=0.2)
        theta = np.array([-5.0, 5.0])
        rows = model.sample(theta, rng_for(19, 0), size=50_000)
        rare = rows[:, 0] == 0.0
        assert np.mean(rare) == pytest.approx(0.2, abs=0.01)
        assert rows[rare, 1].mean() == pytest.approx(-5.0, abs=0.05)
        assert rows[~rare, 1].mean() == pytest.approx(5.0, abs=0.05)

    def test_handle_refit_matches_scratch_fit(self):
        model = RareCategoryModel(gate_eps=0.3)
        handle = model.handle()
        rng = rng_for(20, 0)
        real = model.sample(np.array([1.0, -1.0]), rng, size=30)
        ds = ChainDataset(real)
        theta = handle.init_fit(ds, rng)
        assert np.allclose(theta, model.fit(real), atol=1e-14)
        seen = [real]
        for _ in range(4):
            batch = handle.synth_gen(theta, 5, rng, ds)
            ds.append(batch)
            theta = handle.refit(ds, theta, rng)
            seen.append(batch)
            assert np.allclose(theta, model.fit(np.vstack(seen)), atol=1e-12)

    def test_chain_recovers_rare_category_spread(self):
        # data with the rare category absent: every refit of the pure
        # bootstrap would return exactly zero, while the chain's synthetic
        # draws reintroduce the category and spread the estimate
        model = RareCategoryModel(gate_eps=0.05)
        real = np.column_stack([np.ones(40), 2.0 + rng_for(21, 0).standard_normal(40)])
        config = MpRunConfig(n=40, delta_n=10, cap_n=400, k=30, seed=22)
        ens = run_ensemble(model.handle(), real, config)
        rare_values = ens.members[:, 0]
        assert np.count_nonzero(rare_values) > 0
        assert rare_values.std(ddof=1) > 0.0
