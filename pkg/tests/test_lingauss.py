import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mpost.engine import MpRunConfig, run_ensemble
from mpost.lingauss import (
    SpectralProblem,
    SpectralTask,
    lg_bayes_error,
    lg_fast_ensemble,
    lg_handle,
    lg_posterior,
    lg_sample,
    lg_update,
)
from mpost.seeds import rng_for


class TestProblem:
    def test_singular_values_power_law(self):
        p = SpectralProblem(dim=4, beta=1.0)
        assert np.allclose(p.singular_values, [1.0, 0.5, 1.0 / 3.0, 0.25])

    def test_beta_must_exceed_half(self):
        with pytest.raises(ValueError, match="beta"):
            SpectralProblem(dim=3, beta=0.5)

    def test_weighted_norm(self):
        p = SpectralProblem(dim=2, beta=1.0, alpha_norm=1.0)
        # weights (1, 1/2): |(2, 4)|^2 = 4 + 4 = 8
        assert p.norm_sq([2.0, 4.0]) == pytest.approx(8.0)


class TestPosterior:
    def test_closed_form_literal(self):
        # d=2, beta=1 -> s = (1, 1/2); data {(1,2), (3,4)}: zbar = (2, 3)
        # mean_i = j s_i zbar_i / (j s_i^2 + 1) = (4/3, 2)
        # var_i = 1 / (j s_i^2 + 1) = (1/3, 2/3)
        p = SpectralProblem(dim=2, beta=1.0)
        post = lg_posterior(p, [[1.0, 2.0], [3.0, 4.0]])
        assert np.allclose(post.mean, [4.0 / 3.0, 2.0])
        assert np.allclose(np.diag(post.cov), [1.0 / 3.0, 2.0 / 3.0])
        assert post.exact

    def test_empty_data_rejected(self):
        p = SpectralProblem(dim=2, beta=1.0)
        with pytest.raises(ValueError, match="at least one"):
            lg_posterior(p, np.empty((0, 2)))

    def test_dim_mismatch_rejected(self):
        p = SpectralProblem(dim=3, beta=1.0)
        with pytest.raises(ValueError, match="coordinates"):
            lg_posterior(p, [[1.0, 2.0]])

    def test_bayes_error_literal(self):
        # j=2: 1/3 + (1/4)/(3/2) = 1/3 + 1/6 = 1/2
        p = SpectralProblem(dim=2, beta=1.0, alpha_norm=1.0)
        assert lg_bayes_error(p, 2) == pytest.approx(0.5)

    def test_bayes_error_decreasing(self):
        p = SpectralProblem(dim=10, beta=1.0)
        vals = [lg_bayes_error(p, j) for j in (1, 4, 16, 64)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestFollowerExactness:
    @settings(deadline=None, max_examples=25)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_update_follows_posterior_mean(self, seed):
        # folding the stream one observation at a time must land exactly
        # on the closed-form posterior mean at every step
        p = SpectralProblem(dim=6, beta=1.0)
        rng = rng_for(seed, 0)
        theta0 = rng.standard_normal(p.dim)
        data = lg_sample(p, theta0, rng, size=12)
        theta = np.zeros(p.dim)
        for j in range(1, 13):
            theta = lg_update(p, theta, data[j - 1], j)
            expect = lg_posterior(p, data[:j]).mean
            assert np.max(np.abs(theta - expect)) < 1e-12

    def test_gain_literal(self):
        # s=(1, 1/2), j=2: gain = s / (2 s^2 + 1) = (1/3, 1/3); from
        # theta=0 and z=(3, 5): theta' = (1, 5/3)
        p = SpectralProblem(dim=2, beta=1.0)
        out = lg_update(p, [0.0, 0.0], [3.0, 5.0], 2)
        assert np.allclose(out, [1.0, 5.0 / 3.0], atol=1e-14)


class TestChainDrivers:
    def test_fast_matches_generic(self):
        p = SpectralProblem(dim=5, beta=1.0)
        rng = rng_for(20, 0)
        data = lg_sample(p, rng.standard_normal(5), rng, size=4)
        config = MpRunConfig(n=4, delta_n=1, cap_n=60, k=6, seed=21)
        fast = lg_fast_ensemble(p, data, config)
        slow = run_ensemble(lg_handle(p), data, config)
        assert np.allclose(fast.members, slow.members, rtol=1e-9, atol=1e-12)

    def test_fast_requires_unit_batches(self):
        p = SpectralProblem(dim=2, beta=1.0)
        config = MpRunConfig(n=2, delta_n=2, cap_n=10, k=2, seed=0)
        with pytest.raises(ValueError, match="delta_n == 1"):
            lg_fast_ensemble(p, np.zeros((2, 2)), config)

    def test_zero_horizon_is_posterior_mean_point_mass(self):
        p = SpectralProblem(dim=3, beta=1.0)
        data = rng_for(22, 0).standard_normal((4, 3))
        config = MpRunConfig(n=4, delta_n=1, cap_n=0, k=3, seed=1)
        ens = lg_fast_ensemble(p, data, config)
        assert np.allclose(ens.members, lg_posterior(p, data).mean)

    def test_chain_variance_below_posterior(self):
        # the chain CONTRACTS toward the observed data: its across-chain
        # spread stays below the posterior variance and matches the
        # truncation prediction var_i = sum_r gain_i(r)^2 over rounds
        p = SpectralProblem(dim=3, beta=1.0)
        rng = rng_for(23, 0)
        data = lg_sample(p, rng.standard_normal(3), rng, size=5)
        config = MpRunConfig(n=5, delta_n=1, cap_n=500, k=4000, seed=24)
        ens = lg_fast_ensemble(p, data, config)
        s = p.singular_values
        counts = 5 + np.arange(1, 501, dtype=np.float64)
        predicted = np.sum(
            (s[None, :] / (counts[:, None] * s[None, :] ** 2 + 1.0)) ** 2, axis=0
        )
        observed = ens.members.var(axis=0, ddof=1)
        post_var = np.diag(lg_posterior(p, data).cov)
        mc_se = observed * np.sqrt(2.0 / (config.k - 1))
        assert np.all(observed < post_var + 3.0 * mc_se)
        assert np.allclose(observed, predicted, rtol=0.15)


class TestTaskAdapter:
    def test_interfaces(self):
        p = SpectralProblem(dim=4, beta=1.0)
        task = SpectralTask(p)
        rng = rng_for(25, 0)
        theta = task.sample_theta0(rng)
        data = task.sample_data(theta, 3, rng)
        assert data.shape == (3, 4)
        post = task.posterior(data)
        assert post.mean.shape == (4,)
        assert task.norm_sq(np.ones(4)) == pytest.approx(
            float(np.sum(p.norm_weights**2))
        )
