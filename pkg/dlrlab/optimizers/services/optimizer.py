"""
Optimizer Service

Wraps the pure update rules behind one stateful interface so the trainer
can drive any algorithm the same way:

    optimizer = build_optimizer(config, net.weights)
    outcome = optimizer.step(weights, grad_fn, t)

grad_fn evaluates the current minibatch gradient at any weight point, which
is what the Nesterov lookahead needs; the other rules call it once at the
current weights.
"""

from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple
import logging

from ..exceptions import OptimizerConfigError
from .rules import (
    AdamState, DlrConfig, GradFn, MomentumState, NormMode, ScheduleParams, Weights,
    adam_step, dlr_step, max_neuron_norms, momentum_step, nesterov_step, scheduled_step, sgd_step,
)

logger = logging.getLogger(__name__)


class Algorithm(str, Enum):
    SGD = 'sgd'
    MOMENTUM = 'momentum'
    NESTEROV = 'nesterov'
    ADAM = 'adam'
    DLR_PRE = 'dlr-pre'
    DLR_POST = 'dlr-post'
    SCHEDULED = 'scheduled'

    @property
    def is_dlr(self) -> bool:
        return self in (Algorithm.DLR_PRE, Algorithm.DLR_POST)

    @property
    def norm_mode(self) -> NormMode:
        return NormMode.POST if self is Algorithm.DLR_POST else NormMode.PRE


# Parameters each algorithm is tuned over; used for grids and result tables.
TUNED_PARAMS = {
    Algorithm.SGD: ('eta',),
    Algorithm.MOMENTUM: ('eta', 'mu'),
    Algorithm.NESTEROV: ('eta', 'mu'),
    Algorithm.ADAM: ('adam_alpha', 'epsilon', 'beta1', 'beta2'),
    Algorithm.DLR_PRE: ('eta0', 'alpha'),
    Algorithm.DLR_POST: ('eta0', 'alpha'),
    Algorithm.SCHEDULED: ('schedules',),
}


@dataclass(frozen=True)
class OptimizerConfig:
    algorithm: Algorithm
    eta: float = 0.1
    mu: float = 0.9
    adam_alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    eta0: float = 1.0
    alpha: float = 10.0
    schedules: Tuple[ScheduleParams, ...] = field(default_factory=tuple)

    def __post_init__(self):
        try:
            object.__setattr__(self, 'algorithm', Algorithm(self.algorithm))
        except ValueError:
            choices = ', '.join(a.value for a in Algorithm)
            raise OptimizerConfigError(f"Unknown algorithm '{self.algorithm}' (choose from {choices})")

    def validate(self) -> None:
        """
        Raises:
            OptimizerConfigError: If a parameter the algorithm uses is out of range
        """
        algorithm = self.algorithm
        if algorithm in (Algorithm.SGD, Algorithm.MOMENTUM, Algorithm.NESTEROV) and not self.eta > 0:
            raise OptimizerConfigError(f"eta must be positive, got {self.eta}")
        if algorithm in (Algorithm.MOMENTUM, Algorithm.NESTEROV) and not 0.0 <= self.mu < 1.0:
            raise OptimizerConfigError(f"mu must lie in [0, 1), got {self.mu}")
        if algorithm is Algorithm.ADAM:
            if not (self.adam_alpha > 0 and self.epsilon > 0):
                raise OptimizerConfigError("adam_alpha and epsilon must be positive")
            if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
                raise OptimizerConfigError("beta1 and beta2 must lie in [0, 1)")
        if algorithm.is_dlr:
            self.dlr_config()
        if algorithm is Algorithm.SCHEDULED and len(self.schedules) != 2:
            raise OptimizerConfigError(f"Scheduled training needs 2 layer schedules, got {len(self.schedules)}")

    def dlr_config(self) -> DlrConfig:
        return DlrConfig(eta0=self.eta0, alpha=self.alpha, mode=self.algorithm.norm_mode)

    def tuned_params(self) -> Dict[str, object]:
        """The parameters that matter for this algorithm, in a stable order"""
        params = {}
        for name in TUNED_PARAMS[self.algorithm]:
            if name == 'schedules':
                for layer, schedule in enumerate(self.schedules, start=1):
                    params[f'schedule{layer}'] = list(schedule.as_tuple())
            else:
                params[name] = getattr(self, name)
        return params

    def sort_key(self) -> Tuple:
        """(name, value) pairs by name; values compare numerically, schedules as float tuples"""
        return tuple(
            (name, tuple(float(v) for v in value) if isinstance(value, list) else float(value))
            for name, value in sorted(self.tuned_params().items())
        )

    def with_params(self, **params) -> 'OptimizerConfig':
        return replace(self, **params)

    def to_dict(self) -> Dict[str, object]:
        data = asdict(self)
        data['algorithm'] = self.algorithm.value
        data['schedules'] = [list(s.as_tuple()) for s in self.schedules]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> 'OptimizerConfig':
        data = dict(data)
        data['schedules'] = tuple(ScheduleParams(*s) for s in data.get('schedules') or ())
        return cls(**data)


@dataclass(frozen=True)
class StepOutcome:
    weights: Weights
    rates: Optional[Weights] = None


class TrainingOptimizer:
    """Base class: one step(weights, grad_fn, t) per minibatch"""

    def __init__(self, config: OptimizerConfig):
        self.config = config

    def step(self, weights: Weights, grad_fn: GradFn, t: float) -> StepOutcome:
        raise NotImplementedError


class SgdOptimizer(TrainingOptimizer):
    def step(self, weights, grad_fn, t):
        return StepOutcome(sgd_step(weights, grad_fn(weights), self.config.eta))


class MomentumOptimizer(TrainingOptimizer):
    def __init__(self, config, weights):
        super().__init__(config)
        self.state = MomentumState.zeros(config.mu, config.eta, weights)

    def step(self, weights, grad_fn, t):
        self.state, updated = momentum_step(self.state, weights, grad_fn(weights))
        return StepOutcome(updated)


class NesterovOptimizer(MomentumOptimizer):
    def step(self, weights, grad_fn, t):
        self.state, updated = nesterov_step(self.state, weights, grad_fn)
        return StepOutcome(updated)


class AdamOptimizer(TrainingOptimizer):
    def __init__(self, config, weights):
        super().__init__(config)
        self.state = AdamState.zeros(weights, config.adam_alpha, config.beta1, config.beta2, config.epsilon)

    def step(self, weights, grad_fn, t):
        self.state, updated = adam_step(self.state, weights, grad_fn(weights))
        return StepOutcome(updated)


class DlrOptimizer(TrainingOptimizer):
    """Stateless: rates come from the current weights at every step"""

    def __init__(self, config):
        super().__init__(config)
        self.dlr = config.dlr_config()

    def step(self, weights, grad_fn, t):
        updated, rates = dlr_step(weights, grad_fn(weights), self.dlr)
        return StepOutcome(updated, rates)


class ScheduledOptimizer(TrainingOptimizer):
    def step(self, weights, grad_fn, t):
        return StepOutcome(scheduled_step(weights, grad_fn(weights), t, self.config.schedules))


def build_optimizer(config: OptimizerConfig, weights: Sequence) -> TrainingOptimizer:
    """
    Creates a fresh optimizer (zeroed state) for one trial

    Raises:
        OptimizerConfigError: If the config fails validation
    """
    config.validate()
    algorithm = config.algorithm
    if algorithm is Algorithm.SGD:
        return SgdOptimizer(config)
    if algorithm is Algorithm.MOMENTUM:
        return MomentumOptimizer(config, weights)
    if algorithm is Algorithm.NESTEROV:
        return NesterovOptimizer(config, weights)
    if algorithm is Algorithm.ADAM:
        return AdamOptimizer(config, weights)
    if algorithm.is_dlr:
        return DlrOptimizer(config)
    return ScheduledOptimizer(config)


def check_alpha_regime(weights: Sequence, config: DlrConfig) -> Tuple[float, ...]:
    """
    Largest neuron norm per layer; warns when alpha does not exceed it
    """
    norms = max_neuron_norms(weights, config.mode)
    for layer, norm in enumerate(norms, start=1):
        if config.alpha <= norm:
            logger.warning(
                f"DLR alpha={config.alpha} does not exceed the largest {config.mode.value} "
                f"neuron norm {norm:.4g} of layer {layer}; rates will differ from the start"
            )
    return norms
