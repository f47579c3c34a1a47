"""
Bias-free Logistic MLP

One hidden layer of logistic units, no bias terms anywhere, trained on the
mean squared error. Weight matrices are stored post-synaptic by
pre-synaptic: w1 is H x D and w2 is K x H, so w[i][j] connects pre-synaptic
neuron j to post-synaptic neuron i.
"""

from dataclasses import dataclass
from typing import Callable, Tuple
import logging

import numpy as np
from scipy.special import expit

from ..exceptions import EmptyBatchError, InitializationError, ShapeMismatchError

logger = logging.getLogger(__name__)

INPUT_UNITS = 784
OUTPUT_UNITS = 10
ACCURACY_CHUNK = 2000

Weights = Tuple[np.ndarray, ...]


@dataclass(frozen=True)
class Mlp:
    w1: np.ndarray
    w2: np.ndarray

    def __post_init__(self):
        if self.w1.ndim != 2 or self.w2.ndim != 2:
            raise ShapeMismatchError("Weight matrices must be two-dimensional")
        if self.w2.shape[1] != self.w1.shape[0]:
            raise ShapeMismatchError(
                f"w2 has {self.w2.shape[1]} columns but w1 has {self.w1.shape[0]} rows"
            )

    @property
    def input_units(self) -> int:
        return self.w1.shape[1]

    @property
    def hidden_units(self) -> int:
        return self.w1.shape[0]

    @property
    def output_units(self) -> int:
        return self.w2.shape[0]

    @property
    def weights(self) -> Weights:
        return (self.w1, self.w2)

    @classmethod
    def from_weights(cls, weights: Weights) -> 'Mlp':
        w1, w2 = weights
        return cls(w1=w1, w2=w2)


@dataclass(frozen=True)
class InitSpec:
    seed: int
    scheme: str = 'uniform-fan-in'


@dataclass(frozen=True)
class ForwardTrace:
    """Per-sample pre-activations and activations, one row per sample"""
    z1: np.ndarray
    a1: np.ndarray
    z2: np.ndarray
    a2: np.ndarray


@dataclass(frozen=True)
class Gradients:
    """dC/dw averaged over the minibatch, shaped like (w1, w2)"""
    g1: np.ndarray
    g2: np.ndarray

    def as_tuple(self) -> Weights:
        return (self.g1, self.g2)


def logistic(z):
    """Numerically stable 1 / (1 + exp(-z)) for scalars or arrays"""
    result = expit(np.asarray(z, dtype=np.float64))
    return float(result) if np.ndim(result) == 0 else result


def init_network(hidden_units: int, spec: InitSpec,
                 input_units: int = INPUT_UNITS, output_units: int = OUTPUT_UNITS) -> Mlp:
    """
    Draws every weight uniformly on [-1/sqrt(fan_in), 1/sqrt(fan_in)]

    Args:
        hidden_units: H, at least 1
        spec: Initialization scheme and seed
        input_units: D (784 for MNIST)
        output_units: K (10 for MNIST)

    Returns:
        A fresh Mlp, bitwise identical for identical seeds

    Raises:
        InitializationError: If any layer width is below 1 or the scheme is unknown
    """
    if hidden_units < 1 or input_units < 1 or output_units < 1:
        raise InitializationError(
            f"Layer widths must be positive, got D={input_units} H={hidden_units} K={output_units}"
        )
    if spec.scheme != 'uniform-fan-in':
        raise InitializationError(f"Unknown initialization scheme: {spec.scheme}")

    rng = np.random.default_rng(np.random.SeedSequence(spec.seed & ((1 << 64) - 1)))
    bound1 = 1.0 / np.sqrt(input_units)
    bound2 = 1.0 / np.sqrt(hidden_units)
    w1 = rng.uniform(-bound1, bound1, size=(hidden_units, input_units))
    w2 = rng.uniform(-bound2, bound2, size=(output_units, hidden_units))
    return Mlp(w1=w1, w2=w2)


def _as_batch(x, width: int, what: str) -> np.ndarray:
    batch = np.asarray(x, dtype=np.float64)
    if batch.ndim == 1:
        batch = batch.reshape(1, -1)
    if batch.ndim != 2 or batch.shape[1] != width:
        raise ShapeMismatchError(f"{what} rows must have length {width}, got shape {np.shape(x)}")
    return batch


def forward(net: Mlp, x) -> ForwardTrace:
    x = _as_batch(x, net.input_units, 'Input')
    z1 = x @ net.w1.T
    a1 = expit(z1)
    z2 = a1 @ net.w2.T
    a2 = expit(z2)
    return ForwardTrace(z1=z1, a1=a1, z2=z2, a2=a2)


def mse_loss(a2, y) -> float:
    """Batch mean of (1/2) * sum_k (a2_k - y_k)^2"""
    a2 = np.asarray(a2, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if a2.shape != y.shape:
        raise ShapeMismatchError(f"Output shape {a2.shape} does not match target shape {y.shape}")
    if a2.ndim == 1:
        a2, y = a2.reshape(1, -1), y.reshape(1, -1)
    if a2.shape[0] == 0:
        raise EmptyBatchError("Loss of an empty batch is undefined")
    return float(0.5 * np.mean(np.sum((a2 - y) ** 2, axis=1)))


def backward(net: Mlp, trace: ForwardTrace, x, y) -> Gradients:
    """
    Mean-squared-error backpropagation through both layers

    delta2 = (a2 - y) * a2 (1 - a2); delta1 = (w2^T delta2) * a1 (1 - a1);
    gradients are the batch means of the outer products.
    """
    x = _as_batch(x, net.input_units, 'Input')
    y = _as_batch(y, net.output_units, 'Target')
    if x.shape[0] != y.shape[0] or trace.a2.shape != y.shape:
        raise ShapeMismatchError(
            f"Batch sizes disagree: x {x.shape[0]}, y {y.shape[0]}, trace {trace.a2.shape[0]}"
        )

    count = x.shape[0]
    delta2 = (trace.a2 - y) * trace.a2 * (1.0 - trace.a2)
    delta1 = (delta2 @ net.w2) * trace.a1 * (1.0 - trace.a1)
    g2 = delta2.T @ trace.a1 / count
    g1 = delta1.T @ x / count
    return Gradients(g1=g1, g2=g2)


def make_grad_fn(x, y) -> Callable[[Weights], Weights]:
    """Gradient of the minibatch (x, y) as a function of an arbitrary weight point"""
    def grad_fn(weights: Weights) -> Weights:
        net = Mlp.from_weights(weights)
        return backward(net, forward(net, x), x, y).as_tuple()
    return grad_fn


def predict(net: Mlp, x) -> np.ndarray:
    # argmax returns the first maximum, so ties go to the lowest index
    return np.argmax(forward(net, x).a2, axis=1)


def accuracy(net: Mlp, data) -> float:
    """
    Fraction of samples whose highest output matches the label

    Raises:
        EmptyBatchError: If data holds no samples
    """
    count = len(data)
    if count == 0:
        raise EmptyBatchError("Accuracy of an empty dataset is undefined")

    correct = 0
    for start in range(0, count, ACCURACY_CHUNK):
        stop = start + ACCURACY_CHUNK
        predicted = predict(net, data.x[start:stop])
        correct += int(np.count_nonzero(predicted == data.labels.labels[start:stop]))
    return correct / count
