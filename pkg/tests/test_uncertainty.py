"""Variance networks, ensembles, mixtures, priors, and soft updates."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ivrl.nn import adam_init, init_mlp, sigmoid, softplus
from ivrl.uncertainty import (RAW_VAR_BIAS, VAR_FLOOR, EnsembleState,
                              PriorPair, VarPrediction, init_var_net,
                              loss_attenuation, mixture_moments,
                              mixture_variance, sampled_ensemble_variance,
                              soft_update_params, soft_update_targets,
                              var_net_predict)

from helpers import const_net


def _pair_with_outputs(trainable_mu, prior_mu, raw_var=0.0, delta=1.0):
    """1-action discrete pair whose heads output the given constants."""
    trainable = const_net([2, 2], 0.0)     # outputs [mu, raw_var]
    trainable.biases[-1][:] = [trainable_mu, raw_var]
    prior = const_net([2, 1], 0.0)
    prior.biases[-1][:] = [prior_mu]
    return PriorPair(trainable, prior, delta)


class TestVarNetPredict:
    def test_zero_net_zero_prior_scale(self):
        pair = _pair_with_outputs(0.0, 123.0, raw_var=0.0, delta=0.0)
        pred = var_net_predict(pair, np.zeros(2), 0)
        assert pred.mu == 0.0
        assert abs(pred.sigma2 - (math.log(2) + VAR_FLOOR)) < 1e-12

    def test_prior_adds_to_mean_only(self):
        pair = _pair_with_outputs(2.0, 3.0, raw_var=0.0, delta=1.0)
        pred = var_net_predict(pair, np.zeros(2), 0)
        assert pred.mu == 5.0
        assert abs(pred.sigma2 - (math.log(2) + VAR_FLOOR)) < 1e-12

    def test_seeded_priors_differ(self):
        rng = np.random.default_rng(0)
        trainable = init_var_net(3, [8], 2, rng)
        p1 = PriorPair(trainable, init_mlp([3, 8, 2], np.random.default_rng(1)), 1.0)
        p2 = PriorPair(trainable, init_mlp([3, 8, 2], np.random.default_rng(2)), 1.0)
        s = np.array([0.3, -0.2, 0.9])
        a1, a2 = var_net_predict(p1, s, 0), var_net_predict(p2, s, 0)
        assert a1.mu != a2.mu
        assert a1.sigma2 == a2.sigma2  # prior never touches the variance head

    def test_continuous_input_concatenation(self):
        rng = np.random.default_rng(4)
        trainable = init_var_net(4, [8], 1, rng)
        prior = init_mlp([4, 8, 1], rng)
        pair = PriorPair(trainable, prior, 0.5)
        pred = var_net_predict(pair, np.array([0.1, 0.2, 0.3]), np.array([0.7]))
        assert np.isfinite(pred.mu)
        assert pred.sigma2 >= VAR_FLOOR

    def test_initial_variance_near_one(self):
        rng = np.random.default_rng(8)
        net = init_var_net(4, [64, 64], 2, rng)
        assert np.allclose(net.biases[-1][2:], RAW_VAR_BIAS)

    def test_variance_floor_always_enforced(self):
        pair = _pair_with_outputs(0.0, 0.0, raw_var=-60.0, delta=0.0)
        pred = var_net_predict(pair, np.zeros(2), 0)
        assert pred.sigma2 >= VAR_FLOOR


class TestLossAttenuation:
    def test_zero_residuals_unit_variance(self):
        preds = [VarPrediction(1.0, 1.0), VarPrediction(-2.0, 1.0)]
        assert loss_attenuation(preds, [1.0, -2.0]) == 0.0

    def test_single_sample_hand_value(self):
        assert abs(loss_attenuation([VarPrediction(2.0, 1.0)], [0.0]) - 4.0) < 1e-12

    def test_stationary_at_squared_residual(self):
        # descending on sigma2 alone for fixed residual r recovers sigma2 = r^2
        r = 1.7
        raw = 0.0
        lr = 0.05
        for _ in range(4000):
            s2 = softplus(raw) + VAR_FLOOR
            grad = (-(r**2) / s2**2 + 1.0 / s2) * sigmoid(raw)
            raw -= lr * grad
        s2 = softplus(raw) + VAR_FLOOR
        assert abs(s2 - r**2) / r**2 < 1e-6

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            loss_attenuation([VarPrediction(0.0, 1.0)], [0.0, 1.0])


class TestSampledEnsembleVariance:
    def test_constant_members(self):
        assert sampled_ensemble_variance([5.0] * 5) == (5.0, 0.0)

    def test_hand_population_variance(self):
        mean, var = sampled_ensemble_variance([0.0, 2.0])
        assert (mean, var) == (1.0, 1.0)

    def test_requires_two_members(self):
        with pytest.raises(ValueError):
            sampled_ensemble_variance([3.0])

    @given(st.lists(st.floats(-50, 50), min_size=2, max_size=8),
           st.floats(-100, 100))
    @settings(max_examples=100, deadline=None)
    def test_shift_invariance(self, mus, c):
        m0, v0 = sampled_ensemble_variance(mus)
        m1, v1 = sampled_ensemble_variance([m + c for m in mus])
        assert abs(m1 - (m0 + c)) < 1e-9
        assert abs(v1 - v0) < 1e-9


class TestMixtureVariance:
    def test_identical_members_unchanged(self):
        preds = [VarPrediction(2.5, 0.7)] * 4
        out = mixture_variance(preds)
        assert abs(out.mu - 2.5) < 1e-12
        assert abs(out.sigma2 - 0.7) < 1e-12

    def test_hand_case_mean_spread_only(self):
        # raw-array form: member variances zero, means [0, 2]
        mu, s2 = mixture_moments(np.array([0.0, 2.0]), np.array([0.0, 0.0]))
        assert mu == 1.0
        assert s2 == 1.0

    def test_hand_case_mixed(self):
        out = mixture_variance([VarPrediction(1.0, 2.0), VarPrediction(1.0, 4.0)])
        assert out.mu == 1.0
        assert abs(out.sigma2 - 3.0) < 1e-12

    def test_single_member_identity(self):
        p = VarPrediction(0.3, 0.9)
        assert mixture_variance([p]) is p

    @given(st.lists(st.tuples(st.floats(-30, 30), st.floats(1e-3, 30)),
                    min_size=1, max_size=8))
    @settings(max_examples=200, deadline=None)
    def test_law_of_total_variance(self, pairs):
        mus = np.array([p[0] for p in pairs])
        s2s = np.array([p[1] for p in pairs])
        _, sigma2 = mixture_moments(mus, s2s)
        var_of_means = float(np.mean(mus**2) - np.mean(mus) ** 2)
        assert sigma2 >= var_of_means - 1e-12
        assert sigma2 >= float(np.mean(s2s)) - 1e-12

    def test_batched_axis(self):
        mus = np.array([[0.0, 1.0], [2.0, 1.0]])      # (N=2, K=2)
        s2s = np.array([[0.0, 2.0], [0.0, 4.0]])
        mu, s2 = mixture_moments(mus, s2s)
        np.testing.assert_allclose(mu, [1.0, 1.0])
        np.testing.assert_allclose(s2, [1.0, 3.0])


class TestSoftUpdates:
    def _ensemble(self, rng):
        members = [PriorPair(init_mlp([2, 4, 1], rng), init_mlp([2, 4, 1], rng), 1.0)
                   for _ in range(3)]
        targets = [m.trainable.copy() for m in members]
        adam = [adam_init(m.trainable) for m in members]
        return EnsembleState(members, targets, adam)

    def test_tau_one_copies(self):
        rng = np.random.default_rng(0)
        ens = self._ensemble(rng)
        for t in ens.targets:
            for arr in t.arrays():
                arr += rng.normal(size=arr.shape)
        soft_update_targets(ens, 1.0)
        for pair, tgt in zip(ens.members, ens.targets):
            for a, b in zip(pair.trainable.arrays(), tgt.arrays()):
                np.testing.assert_array_equal(a, b)

    def test_midpoint(self):
        src = const_net([1, 1], 2.0)
        tgt = const_net([1, 1], 0.0)
        soft_update_params(tgt, src, 0.5)
        np.testing.assert_allclose(tgt.weights[0], [[1.0]])

    def test_geometric_convergence(self):
        # distance to the trainable params shrinks by (1 - tau) per call
        src = const_net([1, 1], 1.0)
        tgt = const_net([1, 1], 0.0)
        tau = 0.25
        for k in range(1, 12):
            soft_update_params(tgt, src, tau)
            expected = 1.0 - (1.0 - tau) ** k
            np.testing.assert_allclose(tgt.weights[0][0, 0], expected, rtol=1e-12)

    def test_tau_out_of_range(self):
        rng = np.random.default_rng(1)
        ens = self._ensemble(rng)
        for bad in (0.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                soft_update_targets(ens, bad)

    def test_prior_untouched(self):
        rng = np.random.default_rng(2)
        ens = self._ensemble(rng)
        before = [[a.copy() for a in m.prior.arrays()] for m in ens.members]
        soft_update_targets(ens, 0.3)
        for m, snap in zip(ens.members, before):
            for a, b in zip(m.prior.arrays(), snap):
                np.testing.assert_array_equal(a, b)


class TestVarPredictionInvariants:
    def test_rejects_below_floor(self):
        with pytest.raises(ValueError):
            VarPrediction(0.0, 0.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            VarPrediction(float("inf"), 1.0)
