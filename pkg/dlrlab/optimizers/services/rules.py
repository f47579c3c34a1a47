"""
Weight-Update Rules

Pure step functions over per-layer weight tuples: traditional SGD, classical
and Nesterov momentum, Adam, the dynamic learning rate (DLR) rule in its
pre-norm and post-norm forms, and a uniform per-layer scheduled rate.

Every function returns new arrays; inputs are never modified. States are
frozen dataclasses and come back as replaced copies.

DLR sign convention: the per-synapse rate is stored as a positive number and
the update descends, w <- w - eta0 * (|w| + alpha) / (norm + alpha) * dC/dw.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Sequence, Tuple
import math

import numpy as np

from ..exceptions import OptimizerConfigError, OptimizerShapeError, ScheduleError

Weights = Tuple[np.ndarray, ...]
GradFn = Callable[[Weights], Weights]


def _check_shapes(weights: Sequence[np.ndarray], other: Sequence[np.ndarray], what: str = 'gradient') -> None:
    if len(weights) != len(other):
        raise OptimizerShapeError(f"Expected {len(weights)} {what} layers, got {len(other)}")
    for layer, (w, g) in enumerate(zip(weights, other), start=1):
        if np.shape(w) != np.shape(g):
            raise OptimizerShapeError(
                f"Layer {layer}: weight shape {np.shape(w)} does not match {what} shape {np.shape(g)}"
            )


def zeros_like(weights: Sequence[np.ndarray]) -> Weights:
    return tuple(np.zeros_like(w, dtype=np.float64) for w in weights)


def sgd_step(weights: Sequence[np.ndarray], grads: Sequence[np.ndarray], eta: float) -> Weights:
    """w <- w - eta * g for every layer"""
    _check_shapes(weights, grads)
    return tuple(w - eta * g for w, g in zip(weights, grads))


@dataclass(frozen=True)
class MomentumState:
    mu: float
    eta: float
    velocity: Weights

    @classmethod
    def zeros(cls, mu: float, eta: float, weights: Sequence[np.ndarray]) -> 'MomentumState':
        if not 0.0 <= mu < 1.0:
            raise OptimizerConfigError(f"mu must lie in [0, 1), got {mu}")
        if eta <= 0:
            raise OptimizerConfigError(f"eta must be positive, got {eta}")
        return cls(mu=mu, eta=eta, velocity=zeros_like(weights))


def nesterov_step(state: MomentumState, weights: Sequence[np.ndarray], grad_fn: GradFn) -> Tuple[MomentumState, Weights]:
    """
    Lookahead Nesterov momentum

    g = grad_fn(w + mu * v); v <- mu * v - eta * g; w <- w + v
    """
    _check_shapes(weights, state.velocity, 'velocity')
    lookahead = tuple(w + state.mu * v for w, v in zip(weights, state.velocity))
    grads = grad_fn(lookahead)
    _check_shapes(weights, grads)
    velocity = tuple(state.mu * v - state.eta * g for v, g in zip(state.velocity, grads))
    updated = tuple(w + v for w, v in zip(weights, velocity))
    return replace(state, velocity=velocity), updated


def momentum_step(state: MomentumState, weights: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> Tuple[MomentumState, Weights]:
    """Heavy-ball momentum: v <- mu * v - eta * g(w); w <- w + v"""
    _check_shapes(weights, grads)
    _check_shapes(weights, state.velocity, 'velocity')
    velocity = tuple(state.mu * v - state.eta * g for v, g in zip(state.velocity, grads))
    updated = tuple(w + v for w, v in zip(weights, velocity))
    return replace(state, velocity=velocity), updated


@dataclass(frozen=True)
class AdamState:
    alpha_step: float
    beta1: float
    beta2: float
    epsilon: float
    m: Weights
    v: Weights
    t: int = 0

    @classmethod
    def zeros(cls, weights: Sequence[np.ndarray], alpha_step: float = 1e-3, beta1: float = 0.9,
              beta2: float = 0.999, epsilon: float = 1e-8) -> 'AdamState':
        if alpha_step <= 0 or epsilon <= 0:
            raise OptimizerConfigError("Adam alpha and epsilon must be positive")
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise OptimizerConfigError(f"Adam betas must lie in [0, 1), got {beta1}, {beta2}")
        return cls(alpha_step=alpha_step, beta1=beta1, beta2=beta2, epsilon=epsilon,
                   m=zeros_like(weights), v=zeros_like(weights))


def adam_step(state: AdamState, weights: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> Tuple[AdamState, Weights]:
    """Adam with bias-corrected first and second moments"""
    _check_shapes(weights, grads)
    _check_shapes(weights, state.m, 'first-moment')
    t = state.t + 1
    m = tuple(state.beta1 * m + (1.0 - state.beta1) * g for m, g in zip(state.m, grads))
    v = tuple(state.beta2 * v + (1.0 - state.beta2) * g * g for v, g in zip(state.v, grads))
    correction1 = 1.0 - state.beta1 ** t
    correction2 = 1.0 - state.beta2 ** t
    updated = tuple(
        w - state.alpha_step * (m_k / correction1) / (np.sqrt(v_k / correction2) + state.epsilon)
        for w, m_k, v_k in zip(weights, m, v)
    )
    return replace(state, m=m, v=v, t=t), updated


class NormMode(str, Enum):
    PRE = 'pre-norm'    # column norm ||w_j|| over post-synaptic i
    POST = 'post-norm'  # row norm ||w_i|| over pre-synaptic j


@dataclass(frozen=True)
class DlrConfig:
    eta0: float
    alpha: float
    mode: NormMode = NormMode.PRE

    def __post_init__(self):
        if not self.eta0 > 0:
            raise OptimizerConfigError(f"eta0 must be positive, got {self.eta0}")
        if not self.alpha > 0:
            raise OptimizerConfigError(f"alpha must be positive, got {self.alpha}")
        object.__setattr__(self, 'mode', NormMode(self.mode))


def neuron_norms(weights: np.ndarray, mode: NormMode = NormMode.PRE) -> np.ndarray:
    """
    L2 norm per neuron

    Pre-norm: one value per pre-synaptic neuron j (column j).
    Post-norm: one value per post-synaptic neuron i (row i).
    """
    axis = 0 if NormMode(mode) is NormMode.PRE else 1
    return np.linalg.norm(np.asarray(weights, dtype=np.float64), axis=axis)


def dlr_rates(weights: np.ndarray, config: DlrConfig) -> np.ndarray:
    """
    Per-synapse rates eta0 * (|w_ij| + alpha) / (norm + alpha)

    Computed from the given weights only. Every rate lies in (0, eta0].
    """
    weights = np.asarray(weights, dtype=np.float64)
    norms = neuron_norms(weights, config.mode)
    denominator = norms[np.newaxis, :] if config.mode is NormMode.PRE else norms[:, np.newaxis]
    rates = config.eta0 * (np.abs(weights) + config.alpha) / (denominator + config.alpha)
    # the norm dominates its own entry, rounding aside
    return np.minimum(rates, config.eta0)


def dlr_step(weights: Sequence[np.ndarray], grads: Sequence[np.ndarray], config: DlrConfig) -> Tuple[Weights, Weights]:
    """
    One DLR descent step per layer

    Returns:
        Tuple of (updated weights, rates used), rates evaluated on the
        pre-update weights
    """
    _check_shapes(weights, grads)
    rates = tuple(dlr_rates(w, config) for w in weights)
    updated = tuple(w - r * g for w, r, g in zip(weights, rates, grads))
    return updated, rates


def max_neuron_norms(weights: Sequence[np.ndarray], mode: NormMode = NormMode.PRE) -> Tuple[float, ...]:
    return tuple(float(neuron_norms(w, mode).max(initial=0.0)) for w in weights)


@dataclass(frozen=True)
class ScheduleParams:
    """Uniform layer rate a * exp(b * t^(1/3) + c * t) + d, t in epochs"""
    a: float
    b: float
    c: float
    d: float

    def evaluate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(over='ignore', invalid='ignore'):
            return self.a * np.exp(self.b * np.cbrt(t) + self.c * t) + self.d

    def validate(self, horizon: float, points: int = 1001) -> None:
        """
        Checks the rate stays positive and finite on [0, horizon]

        Raises:
            ScheduleError: If the rate is not positive somewhere on the grid
        """
        grid = np.linspace(0.0, max(horizon, 0.0), points)
        values = self.evaluate(grid)
        bad = ~np.isfinite(values) | (values <= 0)
        if np.any(bad):
            where = float(grid[np.argmax(bad)])
            raise ScheduleError(f"Schedule {self.as_tuple()} is not positive at t={where:.4g} epochs")

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @classmethod
    def constant(cls, rate: float) -> 'ScheduleParams':
        return cls(a=0.0, b=0.0, c=0.0, d=float(rate))


def scheduled_rate(t: float, params: ScheduleParams) -> float:
    """
    Raises:
        ScheduleError: If t is negative or the rate at t is not positive
    """
    if t < 0:
        raise ScheduleError(f"Schedule time must be non-negative, got {t}")
    rate = float(params.evaluate(t))
    if not math.isfinite(rate) or rate <= 0:
        raise ScheduleError(f"Schedule {params.as_tuple()} gives rate {rate} at t={t}")
    return rate


def scheduled_step(weights: Sequence[np.ndarray], grads: Sequence[np.ndarray], t: float,
                   params: Sequence[ScheduleParams]) -> Weights:
    """w <- w - scheduled_rate(t, layer params) * g, one rate per layer"""
    _check_shapes(weights, grads)
    if len(params) != len(weights):
        raise ScheduleError(f"Expected {len(weights)} layer schedules, got {len(params)}")
    return tuple(w - scheduled_rate(t, p) * g for w, g, p in zip(weights, grads, params))

