import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from mnist.services.idx_reader import Dataset, ImageSet, LabelSet

from .exceptions import CheckpointFormatError, EmptyBatchError, InitializationError, ShapeMismatchError
from .services.checkpoint import load_checkpoint, save_checkpoint
from .services.mlp import (
    InitSpec, Mlp, accuracy, backward, forward, init_network, logistic, mse_loss,
)


def dataset_from(pixels, labels):
    pixels = np.asarray(pixels, dtype=np.float32)
    images = ImageSet(rows=1, cols=pixels.shape[1], pixels=pixels)
    return Dataset.from_sets(images, LabelSet(labels=np.asarray(labels)))


def loss_at(net, x, y):
    return mse_loss(forward(net, x).a2, y)


class LogisticTestCase(SimpleTestCase):
    def test_symmetry_point(self):
        self.assertEqual(logistic(0.0), 0.5)

    def test_symmetry_identity(self):
        for z in (-30.0, -2.5, 0.1, 7.0, 40.0):
            self.assertAlmostEqual(logistic(z) + logistic(-z), 1.0, places=15)

    def test_saturation_without_overflow(self):
        with np.errstate(over='raise'):
            value = logistic(500.0)
            low = logistic(-500.0)
        self.assertGreater(value, 1 - 1e-9)
        self.assertLessEqual(value, 1.0)
        self.assertGreaterEqual(low, 0.0)

    def test_array_input(self):
        np.testing.assert_allclose(logistic(np.array([0.0, 0.0])), [0.5, 0.5])


class InitTestCase(SimpleTestCase):
    def test_range_bound(self):
        net = init_network(100, InitSpec(seed=5))
        self.assertEqual(net.w1.shape, (100, 784))
        self.assertEqual(net.w2.shape, (10, 100))
        self.assertLessEqual(np.abs(net.w1).max(), 1 / 28)
        self.assertLessEqual(np.abs(net.w2).max(), 1 / 10)

    def test_same_seed_identical(self):
        first = init_network(20, InitSpec(seed=42))
        second = init_network(20, InitSpec(seed=42))
        np.testing.assert_array_equal(first.w1, second.w1)
        np.testing.assert_array_equal(first.w2, second.w2)

    def test_different_seeds_differ(self):
        base = init_network(8, InitSpec(seed=0))
        for seed in range(1, 6):
            other = init_network(8, InitSpec(seed=seed))
            self.assertFalse(np.array_equal(base.w1, other.w1))

    def test_zero_hidden(self):
        with self.assertRaises(InitializationError):
            init_network(0, InitSpec(seed=1))

    def test_unknown_scheme(self):
        with self.assertRaises(InitializationError):
            init_network(3, InitSpec(seed=1, scheme='normal'))


class ForwardTestCase(SimpleTestCase):
    def test_zero_weights(self):
        net = Mlp(w1=np.zeros((3, 5)), w2=np.zeros((2, 3)))
        trace = forward(net, np.random.default_rng(0).random((4, 5)))
        np.testing.assert_array_equal(trace.a1, np.full((4, 3), 0.5))
        np.testing.assert_array_equal(trace.a2, np.full((4, 2), 0.5))

    def test_scalar_hand_evaluation(self):
        net = Mlp(w1=np.array([[1.0, 1.0]]), w2=np.array([[1.0]]))
        trace = forward(net, np.array([0.0, 0.0]))
        self.assertAlmostEqual(trace.a2[0, 0], 1 / (1 + np.exp(-0.5)), places=14)
        self.assertAlmostEqual(trace.a2[0, 0], 0.62246, places=5)

    def test_wrong_length(self):
        net = Mlp(w1=np.zeros((2, 3)), w2=np.zeros((1, 2)))
        with self.assertRaises(ShapeMismatchError):
            forward(net, np.zeros(4))

    def test_inconsistent_shapes(self):
        with self.assertRaises(ShapeMismatchError):
            Mlp(w1=np.zeros((2, 3)), w2=np.zeros((1, 4)))

    def test_pure(self):
        net = init_network(6, InitSpec(seed=3), input_units=5, output_units=4)
        x = np.random.default_rng(1).random((3, 5))
        first, second = forward(net, x), forward(net, x)
        np.testing.assert_array_equal(first.a2, second.a2)


class LossTestCase(SimpleTestCase):
    def test_zero(self):
        y = np.array([[0.2, 0.8]])
        self.assertEqual(mse_loss(y, y), 0.0)

    def test_hand_evaluation(self):
        self.assertEqual(mse_loss(np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]])), 1.0)

    def test_mean_invariance(self):
        a2 = np.array([[0.3, 0.6]])
        y = np.array([[0.0, 1.0]])
        self.assertAlmostEqual(mse_loss(np.vstack([a2, a2]), np.vstack([y, y])), mse_loss(a2, y), places=15)

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeMismatchError):
            mse_loss(np.zeros((1, 2)), np.zeros((1, 3)))

    def test_empty_batch(self):
        with self.assertRaises(EmptyBatchError):
            mse_loss(np.zeros((0, 2)), np.zeros((0, 2)))


class BackwardTestCase(SimpleTestCase):
    def numerical_gradient(self, net, x, y, layer, step=1e-5):
        weights = [net.w1.copy(), net.w2.copy()]
        grad = np.zeros_like(weights[layer])
        for index in np.ndindex(grad.shape):
            original = weights[layer][index]
            weights[layer][index] = original + step
            plus = loss_at(Mlp.from_weights(tuple(weights)), x, y)
            weights[layer][index] = original - step
            minus = loss_at(Mlp.from_weights(tuple(weights)), x, y)
            weights[layer][index] = original
            grad[index] = (plus - minus) / (2 * step)
        return grad

    def test_zero_residual(self):
        net = init_network(3, InitSpec(seed=2), input_units=4, output_units=2)
        x = np.random.default_rng(0).random((2, 4))
        trace = forward(net, x)
        grads = backward(net, trace, x, trace.a2)
        self.assertFalse(np.any(grads.g1))
        self.assertFalse(np.any(grads.g2))

    def test_one_one_one_chain_rule(self):
        a, b, x, y = 0.7, -1.3, 0.9, 1.0
        net = Mlp(w1=np.array([[a]]), w2=np.array([[b]]))
        a1 = 1 / (1 + np.exp(-a * x))
        a2 = 1 / (1 + np.exp(-b * a1))
        delta2 = (a2 - y) * a2 * (1 - a2)
        grads = backward(net, forward(net, [x]), [x], [y])
        self.assertAlmostEqual(grads.g2[0, 0], delta2 * a1, places=14)
        self.assertAlmostEqual(grads.g1[0, 0], delta2 * b * a1 * (1 - a1) * x, places=14)

    def test_finite_differences_small_net(self):
        rng = np.random.default_rng(10)
        net = Mlp(w1=rng.normal(size=(4, 6)), w2=rng.normal(size=(3, 4)))
        x, y = rng.random((3, 6)), rng.random((3, 3))
        grads = backward(net, forward(net, x), x, y)
        np.testing.assert_allclose(grads.g1, self.numerical_gradient(net, x, y, 0), rtol=1e-5, atol=1e-8)
        np.testing.assert_allclose(grads.g2, self.numerical_gradient(net, x, y, 1), rtol=1e-5, atol=1e-8)

    def test_finite_differences_random_nets(self):
        rng = np.random.default_rng(2024)
        checked = 0
        while checked < 1000:
            d, h, k = rng.integers(1, 9, size=3)
            batch = int(rng.integers(1, 5))
            net = Mlp(w1=rng.normal(size=(h, d)), w2=rng.normal(size=(k, h)))
            x, y = rng.random((batch, d)), rng.random((batch, k))
            grads = backward(net, forward(net, x), x, y)
            for layer, analytic in enumerate(grads.as_tuple()):
                numeric = self.numerical_gradient(net, x, y, layer)
                tolerance = 1e-8 + 1e-5 * np.maximum(np.abs(numeric), np.abs(analytic))
                self.assertTrue(np.all(np.abs(numeric - analytic) <= tolerance))
                checked += analytic.size
        self.assertGreaterEqual(checked, 1000)


class AccuracyTestCase(SimpleTestCase):
    def test_perfect_classifier(self):
        labels = np.arange(10)
        data = dataset_from(np.eye(10), labels)
        net = Mlp(w1=20 * np.eye(10) - 10, w2=20 * np.eye(10) - 10)
        self.assertEqual(accuracy(net, data), 1.0)

    def test_constant_output(self):
        labels = np.array([0, 0, 3, 5, 0, 9, 1, 0])
        data = dataset_from(np.ones((8, 3)), labels)
        net = Mlp(w1=np.zeros((2, 3)), w2=np.zeros((10, 2)))
        self.assertEqual(accuracy(net, data), 0.5)

    def test_single_misclassified(self):
        labels = np.zeros(10, dtype=int)
        labels[4] = 7
        data = dataset_from(np.ones((10, 3)), labels)
        net = Mlp(w1=np.zeros((2, 3)), w2=np.zeros((10, 2)))
        self.assertAlmostEqual(accuracy(net, data), 0.9)

    def test_empty(self):
        data = dataset_from(np.zeros((0, 3)), np.zeros(0, dtype=int))
        net = Mlp(w1=np.zeros((2, 3)), w2=np.zeros((10, 2)))
        with self.assertRaises(EmptyBatchError):
            accuracy(net, data)


class CheckpointTestCase(SimpleTestCase):
    def test_save_and_load(self):
        net = init_network(7, InitSpec(seed=9), input_units=5, output_units=3)
        with tempfile.TemporaryDirectory() as directory:
            path = save_checkpoint(net, 9, Path(directory) / 'weights.dlrw')
            loaded, seed = load_checkpoint(path)
        self.assertEqual(seed, 9)
        np.testing.assert_array_equal(loaded.w1, net.w1)
        np.testing.assert_array_equal(loaded.w2, net.w2)

    def test_rejects_foreign_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'bogus.dlrw'
            path.write_bytes(b'NOPE' + bytes(40))
            with self.assertRaises(CheckpointFormatError):
                load_checkpoint(path)
