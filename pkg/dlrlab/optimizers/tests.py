import math

import numpy as np
from django.test import SimpleTestCase

from .exceptions import OptimizerConfigError, OptimizerShapeError, ScheduleError
from .services.optimizer import (
    Algorithm, OptimizerConfig, build_optimizer, check_alpha_regime,
)
from .services.rules import (
    AdamState, DlrConfig, MomentumState, NormMode, ScheduleParams, adam_step, dlr_rates, dlr_step,
    momentum_step, nesterov_step, neuron_norms, scheduled_rate, scheduled_step, sgd_step,
)


def scalar(value):
    return (np.array([[float(value)]]),)


def constant_grad(value):
    return lambda weights: tuple(np.full_like(w, value) for w in weights)


class SgdTestCase(SimpleTestCase):
    def test_zero_gradient(self):
        weights = (np.array([[1.0, -2.0]]),)
        np.testing.assert_array_equal(sgd_step(weights, (np.zeros((1, 2)),), 0.5)[0], weights[0])

    def test_arithmetic(self):
        self.assertAlmostEqual(sgd_step(scalar(1.0), scalar(0.5), 0.1)[0][0, 0], 0.95, places=15)

    def test_linearity(self):
        rng = np.random.default_rng(0)
        weights = (rng.normal(size=(3, 2)),)
        grads = (rng.normal(size=(3, 2)),)
        twice = sgd_step(sgd_step(weights, grads, 0.1), grads, 0.1)
        once = sgd_step(weights, (2 * grads[0],), 0.1)
        np.testing.assert_allclose(twice[0], once[0], rtol=0, atol=1e-15)

    def test_shape_mismatch(self):
        with self.assertRaises(OptimizerShapeError):
            sgd_step((np.zeros((2, 2)),), (np.zeros((2, 3)),), 0.1)


class MomentumTestCase(SimpleTestCase):
    def test_nesterov_zero_mu_is_sgd(self):
        rng = np.random.default_rng(1)
        weights = (rng.normal(size=(4, 3)), rng.normal(size=(2, 4)))
        grad_fn = lambda w: tuple(np.sin(layer) for layer in w)
        state = MomentumState.zeros(0.0, 0.3, weights)
        expected = weights
        for _ in range(5):
            state, weights = nesterov_step(state, weights, grad_fn)
            expected = sgd_step(expected, grad_fn(expected), 0.3)
            for got, want in zip(weights, expected):
                np.testing.assert_array_equal(got, want)

    def test_nesterov_first_step_is_sgd(self):
        weights = (np.array([[0.5, -1.5]]),)
        grad_fn = lambda w: (w[0] ** 2,)
        state = MomentumState.zeros(0.9, 0.1, weights)
        _, updated = nesterov_step(state, weights, grad_fn)
        np.testing.assert_array_equal(updated[0], sgd_step(weights, grad_fn(weights), 0.1)[0])

    def test_nesterov_two_step_oracle(self):
        state = MomentumState.zeros(0.9, 0.1, scalar(1.0))
        state, weights = nesterov_step(state, scalar(1.0), constant_grad(1.0))
        self.assertAlmostEqual(weights[0][0, 0], 0.9, delta=1e-12)
        state, weights = nesterov_step(state, weights, constant_grad(1.0))
        self.assertAlmostEqual(state.velocity[0][0, 0], -0.19, delta=1e-12)
        self.assertAlmostEqual(weights[0][0, 0], 0.71, delta=1e-12)

    def test_nesterov_gradient_taken_at_lookahead(self):
        seen = []

        def grad_fn(weights):
            seen.append(weights[0][0, 0])
            return (np.ones((1, 1)),)

        state = MomentumState.zeros(0.5, 0.1, scalar(2.0))
        state, weights = nesterov_step(state, scalar(2.0), grad_fn)
        nesterov_step(state, weights, grad_fn)
        self.assertAlmostEqual(seen[1], 1.9 + 0.5 * -0.1, places=15)

    def test_heavy_ball_two_steps(self):
        state = MomentumState.zeros(0.9, 0.1, scalar(1.0))
        state, weights = momentum_step(state, scalar(1.0), scalar(1.0))
        state, weights = momentum_step(state, weights, scalar(1.0))
        self.assertAlmostEqual(weights[0][0, 0], 0.71, delta=1e-12)

    def test_invalid_mu(self):
        with self.assertRaises(OptimizerConfigError):
            MomentumState.zeros(1.0, 0.1, scalar(0.0))


class AdamTestCase(SimpleTestCase):
    def test_zero_gradient(self):
        state = AdamState.zeros(scalar(0.3))
        state, weights = adam_step(state, scalar(0.3), scalar(0.0))
        self.assertEqual(weights[0][0, 0], 0.3)
        self.assertEqual(state.t, 1)

    def test_first_step_is_sign_of_gradient(self):
        for g in (2.5, -0.01, 40.0):
            state = AdamState.zeros(scalar(0.0), alpha_step=0.01, epsilon=1e-8)
            _, weights = adam_step(state, scalar(0.0), scalar(g))
            update = weights[0][0, 0]
            self.assertLessEqual(abs(update + 0.01 * math.copysign(1.0, g)), 0.01 * abs(1e-8 / g) + 1e-15)

    def test_two_step_oracle(self):
        alpha, beta1, beta2, eps = 0.001, 0.9, 0.999, 1e-8
        state = AdamState.zeros(scalar(0.0), alpha, beta1, beta2, eps)
        state, weights = adam_step(state, scalar(0.0), scalar(1.0))
        state, weights = adam_step(state, weights, scalar(1.0))

        m1, v1 = 0.1, 0.001
        w1 = 0.0 - alpha * (m1 / 0.1) / (math.sqrt(v1 / 0.001) + eps)
        m2, v2 = 0.9 * m1 + 0.1, 0.999 * v1 + 0.001
        w2 = w1 - alpha * (m2 / (1 - 0.81)) / (math.sqrt(v2 / (1 - 0.999 ** 2)) + eps)
        self.assertEqual(state.t, 2)
        self.assertAlmostEqual(weights[0][0, 0], w2, delta=1e-12)
        self.assertAlmostEqual(w2, -2 * alpha / (1 + eps), delta=1e-12)

    def test_second_moment_non_negative(self):
        rng = np.random.default_rng(4)
        weights = (rng.normal(size=(3, 3)),)
        state = AdamState.zeros(weights)
        for _ in range(10):
            state, weights = adam_step(state, weights, (rng.normal(size=(3, 3)),))
        self.assertTrue(np.all(state.v[0] >= 0))
        self.assertEqual(state.t, 10)


class NeuronNormTestCase(SimpleTestCase):
    def test_pythagorean_column(self):
        self.assertEqual(neuron_norms(np.array([[3.0], [4.0]]), NormMode.PRE).tolist(), [5.0])

    def test_single_entry(self):
        self.assertEqual(neuron_norms(np.array([[-0.7]]), NormMode.PRE).tolist(), [0.7])

    def test_zero_matrix(self):
        self.assertEqual(neuron_norms(np.zeros((2, 3)), NormMode.POST).tolist(), [0.0, 0.0])

    def test_post_norm_rows(self):
        self.assertEqual(neuron_norms(np.array([[3.0, 4.0], [0.0, 1.0]]), NormMode.POST).tolist(), [5.0, 1.0])


class DlrRateTestCase(SimpleTestCase):
    def test_zero_weights_give_eta0(self):
        rates = dlr_rates(np.zeros((3, 4)), DlrConfig(eta0=0.7, alpha=2.0))
        np.testing.assert_array_equal(rates, np.full((3, 4), 0.7))

    def test_pre_norm_column(self):
        rates = dlr_rates(np.array([[3.0], [4.0]]), DlrConfig(eta0=1.0, alpha=1.0))
        np.testing.assert_allclose(rates.ravel(), [4 / 6, 5 / 6], rtol=1e-15)

    def test_post_norm_row(self):
        rates = dlr_rates(np.array([[3.0, 4.0]]), DlrConfig(eta0=1.0, alpha=1.0, mode=NormMode.POST))
        np.testing.assert_allclose(rates.ravel(), [4 / 6, 5 / 6], rtol=1e-15)

    def test_huge_alpha(self):
        rng = np.random.default_rng(5)
        rates = dlr_rates(rng.normal(size=(5, 5)), DlrConfig(eta0=0.3, alpha=1e12))
        np.testing.assert_allclose(rates, 0.3, rtol=1e-9)

    def test_single_synapse_per_column(self):
        for value in (-5.0, 0.0, 1e-3, 12.0):
            rates = dlr_rates(np.array([[value, -value]]), DlrConfig(eta0=0.4, alpha=0.5))
            np.testing.assert_array_equal(rates, [[0.4, 0.4]])

    def test_invalid_config(self):
        with self.assertRaises(OptimizerConfigError):
            DlrConfig(eta0=0.0, alpha=1.0)
        with self.assertRaises(OptimizerConfigError):
            DlrConfig(eta0=1.0, alpha=-1.0)

    def test_rate_bound_property(self):
        rng = np.random.default_rng(123)
        for _ in range(10_000):
            shape = tuple(rng.integers(1, 7, size=2))
            weights = rng.normal(scale=rng.choice([1e-3, 1.0, 30.0]), size=shape)
            eta0 = float(rng.uniform(0.01, 3.0))
            config = DlrConfig(eta0=eta0, alpha=float(rng.uniform(1e-3, 10.0)),
                               mode=NormMode.PRE if rng.random() < 0.5 else NormMode.POST)
            rates = dlr_rates(weights, config)
            self.assertTrue(np.all(rates > 0))
            self.assertTrue(np.all(rates <= eta0))

    def test_monotonic_within_column_property(self):
        rng = np.random.default_rng(321)
        for _ in range(10_000):
            weights = rng.normal(size=tuple(rng.integers(2, 7, size=2)))
            config = DlrConfig(eta0=float(rng.uniform(0.01, 3.0)), alpha=float(rng.uniform(0.1, 10.0)))
            rates = dlr_rates(weights, config)
            for column in range(weights.shape[1]):
                order = np.argsort(np.abs(weights[:, column]))
                magnitudes = np.abs(weights[order, column])
                ordered_rates = rates[order, column]
                larger = np.diff(magnitudes) > 0
                self.assertTrue(np.all(np.diff(ordered_rates)[larger] > 0))


class DlrStepTestCase(SimpleTestCase):
    def test_zero_gradient(self):
        weights = (np.array([[1.0, 2.0], [3.0, 4.0]]),)
        updated, rates = dlr_step(weights, (np.zeros((2, 2)),), DlrConfig(eta0=1.0, alpha=1.0))
        np.testing.assert_array_equal(updated[0], weights[0])
        self.assertEqual(rates[0].shape, (2, 2))

    def test_hand_evaluation(self):
        updated, rates = dlr_step((np.array([[3.0], [4.0]]),), (np.ones((2, 1)),),
                                  DlrConfig(eta0=0.6, alpha=1.0))
        np.testing.assert_allclose(rates[0].ravel(), [0.4, 0.5], rtol=1e-15)
        np.testing.assert_allclose(updated[0].ravel(), [2.6, 3.5], rtol=1e-15)

    def test_sgd_limit_over_trajectory(self):
        rng = np.random.default_rng(8)
        start = (rng.uniform(-1, 1, size=(6, 5)), rng.uniform(-1, 1, size=(3, 6)))
        stream = [tuple(rng.normal(size=w.shape) * 0.1 for w in start) for _ in range(100)]
        config = DlrConfig(eta0=0.5, alpha=1e12)
        dlr_weights, sgd_weights = start, start
        for grads in stream:
            dlr_weights, _ = dlr_step(dlr_weights, grads, config)
            sgd_weights = sgd_step(sgd_weights, grads, 0.5)
        for got, want in zip(dlr_weights, sgd_weights):
            np.testing.assert_allclose(got, want, rtol=1e-6, atol=1e-12)

    def test_stateless(self):
        rng = np.random.default_rng(9)
        weights = (rng.normal(size=(4, 4)),)
        grads = (rng.normal(size=(4, 4)),)
        config = DlrConfig(eta0=0.2, alpha=3.0, mode=NormMode.POST)
        first, first_rates = dlr_step(weights, grads, config)
        second, second_rates = dlr_step(weights, grads, config)
        np.testing.assert_array_equal(first[0], second[0])
        np.testing.assert_array_equal(first_rates[0], second_rates[0])


class ScheduleTestCase(SimpleTestCase):
    def test_time_zero(self):
        self.assertAlmostEqual(scheduled_rate(0.0, ScheduleParams(0.3, -2.0, 5.0, 0.1)), 0.4, places=15)

    def test_degenerate_constant(self):
        params = ScheduleParams(0.2, 0.0, 0.0, 0.05)
        for t in (0.0, 0.5, 10.0):
            self.assertAlmostEqual(scheduled_rate(t, params), 0.25, places=15)

    def test_hand_evaluation(self):
        rate = scheduled_rate(1.0, ScheduleParams(1.0, -1.0, -1.0, 0.01))
        self.assertAlmostEqual(rate, math.exp(-2) + 0.01, places=15)
        self.assertAlmostEqual(rate, 0.14534, places=5)

    def test_non_positive_rate(self):
        with self.assertRaises(ScheduleError):
            scheduled_rate(1.0, ScheduleParams(-1.0, 0.0, 0.0, 0.5))

    def test_validate_over_horizon(self):
        ScheduleParams(1.0, -1.0, -1.0, 0.01).validate(5.0)
        with self.assertRaises(ScheduleError):
            ScheduleParams(1.0, 0.0, -1.0, -0.2).validate(5.0)

    def test_constant_schedule_is_sgd(self):
        rng = np.random.default_rng(2)
        weights = (rng.normal(size=(3, 2)), rng.normal(size=(2, 3)))
        grads = tuple(rng.normal(size=w.shape) for w in weights)
        schedules = (ScheduleParams.constant(0.3), ScheduleParams.constant(0.3))
        for got, want in zip(scheduled_step(weights, grads, 0.7, schedules), sgd_step(weights, grads, 0.3)):
            np.testing.assert_array_equal(got, want)

    def test_zero_gradient(self):
        weights = (np.ones((2, 2)), np.ones((2, 2)))
        schedules = (ScheduleParams.constant(0.3), ScheduleParams.constant(0.1))
        updated = scheduled_step(weights, (np.zeros((2, 2)), np.zeros((2, 2))), 1.0, schedules)
        np.testing.assert_array_equal(updated[0], weights[0])

    def test_layer_distinct_rates(self):
        weights = (np.ones((2, 2)), np.ones((2, 2)))
        grads = (np.ones((2, 2)), np.ones((2, 2)))
        schedules = (ScheduleParams(0.1, 0.0, 0.0, 0.1), ScheduleParams(0.0, 0.0, 0.0, 0.5))
        first, second = scheduled_step(weights, grads, 2.0, schedules)
        np.testing.assert_allclose(first, np.full((2, 2), 0.8), rtol=1e-15)
        np.testing.assert_allclose(second, np.full((2, 2), 0.5), rtol=1e-15)


class OptimizerServiceTestCase(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(3)
        self.weights = (rng.normal(size=(3, 4)), rng.normal(size=(2, 3)))
        self.grad_fn = lambda w: tuple(0.1 * layer for layer in w)

    def test_every_algorithm_steps(self):
        schedules = (ScheduleParams.constant(0.1), ScheduleParams.constant(0.1))
        for algorithm in Algorithm:
            config = OptimizerConfig(algorithm=algorithm, schedules=schedules)
            optimizer = build_optimizer(config, self.weights)
            outcome = optimizer.step(self.weights, self.grad_fn, 0.0)
            self.assertEqual([w.shape for w in outcome.weights], [(3, 4), (2, 3)])
            self.assertEqual(outcome.rates is not None, algorithm.is_dlr)

    def test_dlr_wrapper_matches_rule(self):
        config = OptimizerConfig(algorithm='dlr-post', eta0=0.5, alpha=2.0)
        outcome = build_optimizer(config, self.weights).step(self.weights, self.grad_fn, 0.0)
        expected, _ = dlr_step(self.weights, self.grad_fn(self.weights), DlrConfig(0.5, 2.0, NormMode.POST))
        np.testing.assert_array_equal(outcome.weights[1], expected[1])

    def test_unknown_algorithm(self):
        with self.assertRaises(OptimizerConfigError):
            OptimizerConfig(algorithm='adagrad')

    def test_invalid_parameters(self):
        for config in (OptimizerConfig('sgd', eta=0.0), OptimizerConfig('nesterov', mu=1.2),
                       OptimizerConfig('adam', epsilon=0.0), OptimizerConfig('dlr-pre', alpha=0.0),
                       OptimizerConfig('scheduled')):
            with self.assertRaises(OptimizerConfigError):
                build_optimizer(config, self.weights)

    def test_dict_round_trip(self):
        config = OptimizerConfig('scheduled', schedules=(ScheduleParams(1, -1, 0, 0.1), ScheduleParams.constant(0.2)))
        self.assertEqual(OptimizerConfig.from_dict(config.to_dict()), config)

    def test_tuned_params(self):
        self.assertEqual(OptimizerConfig('dlr-pre', eta0=0.3, alpha=3.0).tuned_params(), {'eta0': 0.3, 'alpha': 3.0})

    def test_alpha_regime_warning(self):
        weights = (np.full((2, 2), 3.0),)
        with self.assertLogs('optimizers.services.optimizer', level='WARNING'):
            check_alpha_regime(weights, DlrConfig(eta0=1.0, alpha=1.0))
        norms = check_alpha_regime(weights, DlrConfig(eta0=1.0, alpha=100.0))
        self.assertAlmostEqual(norms[0], math.sqrt(18), places=12)
