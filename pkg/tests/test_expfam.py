import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mpost.engine import MpRunConfig, run_ensemble
from mpost.expfam import (
    ConjugatePrior,
    ConjugatePosterior,
    ExpFamilyModel,
    ExpFamilyTask,
    conjugate_posterior,
    gaussian_seq_mle_ensemble,
    radius_closed_form,
    seq_mle_handle,
    seq_mle_update,
)
from mpost.metrics import radius_mc
from mpost.seeds import rng_for


class TestModelConstruction:
    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError, match="family"):
            ExpFamilyModel("poisson", 2)

    def test_gaussian_defaults_to_identity_cov(self):
        m = ExpFamilyModel("gaussian", 3)
        assert np.array_equal(m.cov, np.eye(3))

    def test_cov_shape_checked(self):
        with pytest.raises(ValueError, match="shape"):
            ExpFamilyModel("gaussian", 3, cov=np.eye(2))

    def test_cov_forbidden_off_gaussian(self):
        with pytest.raises(ValueError, match="gaussian"):
            ExpFamilyModel("bernoulli", 2, cov=np.eye(2))

    def test_non_spd_cov_rejected(self):
        with pytest.raises(ValueError, match="positive definite"):
            ExpFamilyModel("gaussian", 2, cov=np.diag([1.0, -1.0]))


class TestDomains:
    def test_bernoulli_mean_open_interval(self):
        m = ExpFamilyModel("bernoulli", 2)
        m.check_mean([0.5, 0.9])
        for bad in ([0.0, 0.5], [0.5, 1.0], [-0.1, 0.5]):
            with pytest.raises(ValueError, match="bernoulli mean"):
                m.check_mean(bad)

    def test_exponential_mean_positive(self):
        m = ExpFamilyModel("exponential", 1)
        m.check_mean([2.0])
        with pytest.raises(ValueError, match="positive"):
            m.check_mean([0.0])

    def test_bernoulli_data_binary(self):
        m = ExpFamilyModel("bernoulli", 1)
        m.check_data([[0.0], [1.0]])
        with pytest.raises(ValueError, match="0 or 1"):
            m.check_data([[0.5]])

    def test_exponential_data_positive(self):
        m = ExpFamilyModel("exponential", 1)
        with pytest.raises(ValueError, match="positive"):
            m.check_data([[0.0]])

    def test_clamp_counts_hits(self):
        m = ExpFamilyModel("bernoulli", 3)
        clamped, hits = m.clamp_mean(np.array([-0.1, 0.5, 1.2]))
        assert hits == 2
        assert 0.0 < clamped[0] < clamped[1] < clamped[2] < 1.0
        assert clamped[1] == 0.5

    def test_gaussian_clamp_is_identity(self):
        m = ExpFamilyModel("gaussian", 2)
        theta = np.array([1e6, -1e6])
        clamped, hits = m.clamp_mean(theta)
        assert hits == 0
        assert np.array_equal(clamped, theta)


class TestSampling:
    def test_shapes(self):
        m = ExpFamilyModel("gaussian", 2)
        rng = rng_for(0, 0)
        assert m.sample([0.0, 0.0], rng).shape == (2,)
        assert m.sample([0.0, 0.0], rng, size=7).shape == (7, 2)

    def test_gaussian_moments(self):
        cov = np.array([[2.0, 0.6], [0.6, 1.0]])
        m = ExpFamilyModel("gaussian", 2, cov=cov)
        draws = m.sample([1.0, -2.0], rng_for(1, 0), size=200_000)
        assert np.allclose(draws.mean(axis=0), [1.0, -2.0], atol=0.02)
        assert np.allclose(np.cov(draws.T), cov, atol=0.03)

    def test_bernoulli_mean(self):
        m = ExpFamilyModel("bernoulli", 2)
        draws = m.sample([0.2, 0.8], rng_for(2, 0), size=100_000)
        assert set(np.unique(draws)) <= {0.0, 1.0}
        assert np.allclose(draws.mean(axis=0), [0.2, 0.8], atol=0.01)

    def test_exponential_mean(self):
        m = ExpFamilyModel("exponential", 1)
        draws = m.sample([3.0], rng_for(3, 0), size=100_000)
        assert np.all(draws > 0)
        assert abs(draws.mean() - 3.0) < 0.05


class TestFisherInfo:
    def test_gaussian_is_precision(self):
        cov = np.array([[4.0, 1.0], [1.0, 2.0]])
        m = ExpFamilyModel("gaussian", 2, cov=cov)
        assert np.allclose(m.fisher_info([0.0, 0.0]), np.linalg.inv(cov))

    def test_bernoulli_value(self):
        m = ExpFamilyModel("bernoulli", 1)
        # 1 / (0.25 * 0.75) = 16/3
        assert np.allclose(m.fisher_info([0.25]), [[16.0 / 3.0]])

    def test_exponential_value(self):
        m = ExpFamilyModel("exponential", 1)
        assert np.allclose(m.fisher_info([2.0]), [[0.25]])

    def test_boundary_singular(self):
        m = ExpFamilyModel("bernoulli", 1)
        with pytest.raises(ValueError, match="singular"):
            m.fisher_info([1.0])


class TestSeqMleUpdate:
    def test_first_observation_overwrites(self):
        out = seq_mle_update([5.0], [2.0], 1)
        assert np.array_equal(out, [2.0])

    @given(
        st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
            min_size=1,
            max_size=30,
        )
    )
    def test_folding_equals_running_mean(self, values):
        theta = np.zeros(1)
        for j, v in enumerate(values, start=1):
            theta = seq_mle_update(theta, [v], j)
        assert np.allclose(theta, np.mean(values), rtol=1e-12, atol=1e-9)

    def test_j_must_be_positive(self):
        with pytest.raises(ValueError):
            seq_mle_update([0.0], [1.0], 0)


class TestConjugatePosterior:
    def test_gaussian_fold_literal(self):
        # prior: strength 2, pseudo-stat [4, 0] (prior mean [2, 0]);
        # data {(1,1), (3,3)} -> strength 4, stat_sum [8, 4], mean [2, 1]
        m = ExpFamilyModel("gaussian", 2)
        prior = ConjugatePrior(2.0, [4.0, 0.0])
        post = conjugate_posterior(m, prior, [[1.0, 1.0], [3.0, 3.0]])
        assert post.strength == 4.0
        assert np.array_equal(post.stat_sum, [8.0, 4.0])
        assert np.array_equal(post.mean_param, [2.0, 1.0])

    def test_empty_data_returns_prior(self):
        m = ExpFamilyModel("gaussian", 1)
        prior = ConjugatePrior(1.5, [0.75])
        post = conjugate_posterior(m, prior, [])
        assert post.strength == 1.5
        assert np.array_equal(post.stat_sum, [0.75])

    def test_gaussian_summary_cov(self):
        cov = np.diag([2.0, 8.0])
        m = ExpFamilyModel("gaussian", 2, cov=cov)
        post = ConjugatePosterior(m, 4.0, np.array([4.0, 8.0]))
        summary = post.gaussian_summary()
        assert summary.exact
        assert np.allclose(summary.mean, [1.0, 2.0])
        assert np.allclose(summary.cov, cov / 4.0)

    def test_gaussian_summary_requires_gaussian(self):
        m = ExpFamilyModel("bernoulli", 1)
        post = ConjugatePosterior(m, 2.0, np.array([1.0]))
        with pytest.raises(ValueError, match="gaussian family"):
            post.gaussian_summary()

    def test_prior_mean_domain_validated(self):
        m = ExpFamilyModel("bernoulli", 1)
        prior = ConjugatePrior(1.0, [2.0])  # implied mean 2 outside [0, 1]
        with pytest.raises(ValueError, match="closure"):
            conjugate_posterior(m, prior, [[1.0]])

    def test_bernoulli_sample_is_beta(self):
        # strength 5, stat_sum 3 -> Beta(3, 2): mean 0.6, var 0.04
        m = ExpFamilyModel("bernoulli", 1)
        post = ConjugatePosterior(m, 5.0, np.array([3.0]))
        draws = post.sample(rng_for(4, 0), size=200_000)[:, 0]
        assert abs(draws.mean() - 0.6) < 0.005
        assert abs(draws.var() - 0.04) < 0.002

    def test_exponential_sample_mean(self):
        # mean parameter has posterior expectation stat_sum / strength
        m = ExpFamilyModel("exponential", 1)
        post = ConjugatePosterior(m, 6.0, np.array([12.0]))
        draws = post.sample(rng_for(5, 0), size=200_000)[:, 0]
        assert abs(draws.mean() - 2.0) < 0.02

    def test_gaussian_sample_cov_shrinks_with_strength(self):
        m = ExpFamilyModel("gaussian", 1)
        post = ConjugatePosterior(m, 16.0, np.array([0.0]))
        draws = post.sample(rng_for(6, 0), size=100_000)
        assert abs(draws.var() - 1.0 / 16.0) < 0.002

    def test_bernoulli_boundary_pseudocounts_rejected(self):
        m = ExpFamilyModel("bernoulli", 1)
        post = ConjugatePosterior(m, 2.0, np.array([2.0]))  # b = 0
        with pytest.raises(ValueError, match="positive mass"):
            post.sample(rng_for(7, 0))


class TestRadius:
    def test_closed_form_literal(self):
        # tr(diag(2, 3)) / (4 + 1) = 1
        m = ExpFamilyModel("gaussian", 2, cov=np.diag([2.0, 3.0]))
        prior = ConjugatePrior(1.0, np.zeros(2))
        assert radius_closed_form(m, prior, 4) == pytest.approx(1.0)

    def test_decreasing_in_j(self):
        m = ExpFamilyModel("gaussian", 3)
        prior = ConjugatePrior(1.0, np.zeros(3))
        values = [radius_closed_form(m, prior, j) for j in (1, 5, 25, 125)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_requires_gaussian(self):
        m = ExpFamilyModel("exponential", 1)
        prior = ConjugatePrior(1.0, [1.0])
        with pytest.raises(ValueError, match="gaussian"):
            radius_closed_form(m, prior, 3)

    def test_mc_estimate_matches_closed_form(self):
        # dual route: simulation through the task adapter against algebra
        m = ExpFamilyModel("gaussian", 2)
        prior = ConjugatePrior(1.0, np.zeros(2))
        task = ExpFamilyTask(m, prior)
        est = radius_mc(task, j=10, reps=4000, rng=rng_for(8, 0))
        exact = radius_closed_form(m, prior, 10)
        assert abs(est.value - exact) < 3.0 * est.std_error


class TestChainDrivers:
    def test_handle_refit_tracks_running_mean(self):
        m = ExpFamilyModel("gaussian", 2)
        handle = seq_mle_handle(m)
        config = MpRunConfig(n=4, delta_n=3, cap_n=9, k=1, seed=11)
        data = rng_for(9, 0).standard_normal((4, 2))
        ens = run_ensemble(handle, data, config)
        assert ens.members.shape == (1, 2)

    def test_vectorized_driver_matches_generic(self):
        # same substreams, same draw order: agreement to reassociation error
        m = ExpFamilyModel("gaussian", 3, cov=np.diag([1.0, 2.0, 0.5]))
        data = rng_for(10, 0).standard_normal((6, 3))
        for delta_n in (1, 4):
            config = MpRunConfig(n=6, delta_n=delta_n, cap_n=40, k=8, seed=77)
            fast = gaussian_seq_mle_ensemble(m, data, config)
            slow = run_ensemble(seq_mle_handle(m), data, config)
            assert np.allclose(fast.members, slow.members, rtol=1e-9, atol=1e-12)

    def test_vectorized_driver_rejects_non_gaussian(self):
        m = ExpFamilyModel("bernoulli", 1)
        config = MpRunConfig(n=2, delta_n=1, cap_n=4, k=2, seed=0)
        with pytest.raises(ValueError, match="gaussian"):
            gaussian_seq_mle_ensemble(m, [[0.0], [1.0]], config)

    def test_zero_horizon_returns_point_mass(self):
        m = ExpFamilyModel("gaussian", 2)
        data = np.array([[1.0, 3.0], [3.0, 5.0]])
        config = MpRunConfig(n=2, delta_n=1, cap_n=0, k=5, seed=0)
        ens = gaussian_seq_mle_ensemble(m, data, config)
        assert np.allclose(ens.members, [2.0, 4.0])
        assert ens.inflation == 1.0

    def test_chain_mean_centered_on_mle(self):
        # martingale property: innovations have zero mean, so the ensemble
        # mean sits on the initial fit within Monte Carlo error
        m = ExpFamilyModel("gaussian", 1)
        data = np.array([[0.3], [0.9], [1.2], [0.2]])
        config = MpRunConfig(n=4, delta_n=1, cap_n=400, k=4000, seed=13)
        ens = gaussian_seq_mle_ensemble(m, data, config)
        se = float(ens.members.std(ddof=1) / np.sqrt(config.k))
        assert abs(ens.empirical_mean[0] - data.mean()) < 3.0 * se

    def test_bernoulli_chain_counts_clamps(self):
        # all-ones data puts the fit on the boundary; the chain must clamp
        m = ExpFamilyModel("bernoulli", 1)
        data = np.ones((5, 1))
        config = MpRunConfig(n=5, delta_n=1, cap_n=10, k=3, seed=1)
        ens = run_ensemble(seq_mle_handle(m), data, config)
        assert ens.clamp_events >= 3
        assert np.all(ens.members < 1.0)


class TestTaskAdapter:
    def test_shapes_and_norm(self):
        m = ExpFamilyModel("gaussian", 3)
        task = ExpFamilyTask(m, ConjugatePrior(2.0, np.zeros(3)))
        rng = rng_for(12, 0)
        theta = task.sample_theta0(rng)
        assert theta.shape == (3,)
        data = task.sample_data(theta, 5, rng)
        assert data.shape == (5, 3)
        assert task.posterior(data).strength == 7.0
        assert task.norm_sq([3.0, 4.0, 0.0]) == pytest.approx(25.0)
