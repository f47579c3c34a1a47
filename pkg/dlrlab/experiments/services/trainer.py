"""
Train-to-Threshold Service

Runs one seeded training trial: minibatch updates with the configured
optimizer, a test-set evaluation every eval_interval updates, and a stop at
the first checkpoint whose accuracy reaches the threshold (or when the epoch
budget runs out). DLR trials also record the mean learning rate of each
layer at every checkpoint.

Training time is measured in fractional epochs: samples seen divided by
the training-set size.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple
import logging

from mnist.services.batching import make_batches
from mnist.services.idx_reader import Dataset
from network.services.mlp import InitSpec, Mlp, accuracy, init_network, make_grad_fn
from optimizers.exceptions import OptimizerError
from optimizers.services.optimizer import Algorithm, OptimizerConfig, build_optimizer, check_alpha_regime
from traces.services.rate_trace import RateTrace, record

from ..exceptions import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialConfig:
    hidden_units: int
    optimizer: OptimizerConfig
    batch_size: int = 10
    accuracy_threshold: float = 0.96
    max_epochs: float = 30.0
    eval_interval: int = 100
    seed: int = 0
    init_scheme: str = 'uniform-fan-in'
    stop_at_threshold: bool = True

    def validate(self) -> None:
        """
        Raises:
            ConfigurationError: If any field is out of range, including the optimizer's
        """
        if self.hidden_units < 1:
            raise ConfigurationError(f"hidden_units must be at least 1, got {self.hidden_units}")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be at least 1, got {self.batch_size}")
        if not 0.0 <= self.accuracy_threshold <= 1.0:
            raise ConfigurationError(f"accuracy_threshold must lie in [0, 1], got {self.accuracy_threshold}")
        if self.max_epochs < 0:
            raise ConfigurationError(f"max_epochs must be non-negative, got {self.max_epochs}")
        if self.eval_interval < 1:
            raise ConfigurationError(f"eval_interval must be at least 1, got {self.eval_interval}")
        try:
            self.optimizer.validate()
        except OptimizerError as e:
            raise ConfigurationError(str(e))

    def with_changes(self, **changes) -> 'TrialConfig':
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, object]:
        return {
            'hidden_units': self.hidden_units,
            'optimizer': self.optimizer.to_dict(),
            'batch_size': self.batch_size,
            'accuracy_threshold': self.accuracy_threshold,
            'max_epochs': self.max_epochs,
            'eval_interval': self.eval_interval,
            'seed': self.seed,
            'init_scheme': self.init_scheme,
            'stop_at_threshold': self.stop_at_threshold,
        }


@dataclass(frozen=True)
class TrialRecord:
    config: TrialConfig
    curve: Tuple[Tuple[float, float], ...]
    epochs_to_threshold: Optional[float]
    final_accuracy: float
    traces: Tuple[RateTrace, ...] = ()
    network: Optional[Mlp] = field(default=None, compare=False, repr=False)

    @property
    def reached(self) -> bool:
        return self.epochs_to_threshold is not None

    @property
    def run_id(self) -> str:
        return f"{self.config.optimizer.algorithm.value}-h{self.config.hidden_units}-s{self.config.seed}"


def train_to_threshold(config: TrialConfig, train: Dataset, test: Dataset) -> TrialRecord:
    """
    Trains one network until the test accuracy reaches the threshold

    Args:
        config: Trial configuration
        train: Training split, shuffled per epoch from (seed, epoch)
        test: Split evaluated at every checkpoint

    Returns:
        TrialRecord with the accuracy curve, epochs-to-threshold (None if
        not reached), final accuracy and, for DLR, the per-layer rate traces

    Raises:
        ConfigurationError: If the config is invalid
        ScheduleError: If a scheduled rate turns non-positive during training
    """
    config.validate()
    algorithm = config.optimizer.algorithm
    net = init_network(
        config.hidden_units,
        InitSpec(seed=config.seed, scheme=config.init_scheme),
        input_units=train.x.shape[1],
        output_units=train.y.shape[1],
    )
    optimizer = build_optimizer(config.optimizer, net.weights)
    if algorithm.is_dlr:
        check_alpha_regime(net.weights, config.optimizer.dlr_config())
    if algorithm is Algorithm.SCHEDULED:
        for schedule in config.optimizer.schedules:
            schedule.validate(config.max_epochs)

    count = len(train)
    budget = config.max_epochs * count
    weights = net.weights
    traces = tuple(RateTrace(layer_id=layer) for layer in (1, 2)) if algorithm.is_dlr else ()
    latest_rates = None
    curve = []
    reached_at = None
    samples_seen = 0
    updates = 0
    epoch = 0
    finished = samples_seen >= budget

    while not finished:
        for batch in make_batches(train, config.batch_size, config.seed, epoch):
            outcome = optimizer.step(weights, make_grad_fn(train.x[batch], train.y[batch]), samples_seen / count)
            weights = outcome.weights
            if outcome.rates is not None:
                latest_rates = outcome.rates
            samples_seen += len(batch)
            updates += 1

            if updates % config.eval_interval == 0:
                t = samples_seen / count
                test_accuracy = accuracy(Mlp.from_weights(weights), test)
                curve.append((t, test_accuracy))
                if latest_rates is not None:
                    traces = tuple(record(trace, t, rates) for trace, rates in zip(traces, latest_rates))
                if reached_at is None and test_accuracy >= config.accuracy_threshold:
                    reached_at = t
                    logger.debug(f"Trial {algorithm.value} h={config.hidden_units} seed={config.seed} "
                                 f"reached {test_accuracy:.4f} at {t:.4f} epochs")
                    if config.stop_at_threshold:
                        finished = True
                        break

            if samples_seen >= budget:
                finished = True
                break
        epoch += 1

    final_net = Mlp.from_weights(weights)
    if curve and curve[-1][0] == samples_seen / count:
        final_accuracy = curve[-1][1]
    else:
        final_accuracy = accuracy(final_net, test)

    return TrialRecord(
        config=config,
        curve=tuple(curve),
        epochs_to_threshold=reached_at,
        final_accuracy=final_accuracy,
        traces=traces,
        network=final_net,
    )
