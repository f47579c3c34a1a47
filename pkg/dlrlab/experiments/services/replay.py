"""
Average-Rate Replay Service

Checks whether DLR's speed comes from its per-synapse rates or only from
their average over time:

1. Train a DLR cohort, recording each layer's mean rate at every checkpoint
   (past the threshold, up to the trace horizon).
2. Fit the schedule family to each layer's cohort-mean trace.
3. Train a fresh cohort (new seeds) with one uniform scheduled rate per
   layer and compare epochs-to-threshold.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from mnist.services.idx_reader import Dataset
from optimizers.exceptions import ScheduleError
from optimizers.services.optimizer import Algorithm, OptimizerConfig
from traces.services.rate_trace import RateTrace, average_traces
from traces.services.schedule_fit import DEFAULT_STARTS, FitResult, fit_traces

from ..exceptions import ConfigurationError
from .runner import run_trials
from .statistics import SummaryStats, median_curve, summarize
from .trainer import TrialConfig, TrialRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReplayResult:
    dlr_records: Tuple[TrialRecord, ...]
    averaged_traces: Tuple[RateTrace, ...]
    fits: Tuple[FitResult, ...]
    replay_records: Tuple[TrialRecord, ...]

    @property
    def dlr_stats(self) -> SummaryStats:
        return summarize([record.epochs_to_threshold for record in self.dlr_records])

    @property
    def replay_stats(self) -> SummaryStats:
        return summarize([record.epochs_to_threshold for record in self.replay_records])

    @property
    def dlr_median_curve(self) -> List[Tuple[float, float]]:
        return median_curve(self.dlr_records)

    @property
    def replay_median_curve(self) -> List[Tuple[float, float]]:
        return median_curve(self.replay_records)

    @property
    def dlr_faster(self) -> Optional[bool]:
        """Whether the DLR cohort's median beats the replay cohort's; None if either never reached"""
        dlr, replay = self.dlr_stats.median, self.replay_stats.median
        if dlr is None or replay is None:
            return None
        return dlr < replay

    def to_dict(self) -> Dict[str, object]:
        return {
            'dlr': self.dlr_stats.to_dict(),
            'replay': self.replay_stats.to_dict(),
            'dlr_faster': self.dlr_faster,
            'fits': [fit.to_dict() for fit in self.fits],
        }


def cohort_traces(records: Sequence[TrialRecord]) -> List[RateTrace]:
    """Cohort-mean trace per layer"""
    layers = len(records[0].traces)
    return [average_traces([record.traces[layer] for record in records]) for layer in range(layers)]


def replay_experiment(dlr_trial: TrialConfig, seeds: Sequence[int], train: Dataset, test: Dataset,
                      workers: int = 1, trace_epochs: Optional[float] = None, seed_offset: int = 1000,
                      fit_starts: int = DEFAULT_STARTS, fit_seed: int = 0) -> ReplayResult:
    """
    Runs the three phases

    Args:
        dlr_trial: DLR trial template; its max_epochs is the replay budget
        seeds: Seeds of the DLR cohort; the replay cohort uses seed + seed_offset
        train: Training split
        test: Evaluation split
        workers: Process count
        trace_epochs: How long the DLR cohort trains (keeps recording past
            the threshold); defaults to max_epochs
        seed_offset: Offset giving the replay cohort fresh seeds
        fit_starts: Nelder-Mead starts per layer fit
        fit_seed: Seed of the random fit starts

    Raises:
        ConfigurationError: If the trial is not DLR or no seeds are given
        ScheduleFitError: If a layer fit fails or does not converge (carries the fits)
        ScheduleError: If a fitted schedule is not positive over [0, max_epochs]
    """
    if not dlr_trial.optimizer.algorithm.is_dlr:
        raise ConfigurationError(
            f"Replay needs a DLR trial, got {dlr_trial.optimizer.algorithm.value}"
        )
    if not seeds:
        raise ConfigurationError("At least one seed is required")
    horizon = dlr_trial.max_epochs if trace_epochs is None else trace_epochs

    dlr_configs = [
        dlr_trial.with_changes(seed=seed, stop_at_threshold=False, max_epochs=horizon)
        for seed in seeds
    ]
    dlr_records = run_trials(dlr_configs, train, test, workers=workers)
    logger.info(f"DLR cohort: {sum(r.reached for r in dlr_records)}/{len(seeds)} runs reached the threshold")

    traces = cohort_traces(dlr_records)
    fits = fit_traces(traces, starts=fit_starts, seed=fit_seed, require_convergence=True)
    schedules = tuple(fit.params for fit in fits)
    for fit in fits:
        try:
            fit.params.validate(dlr_trial.max_epochs)
        except ScheduleError as e:
            raise ScheduleError(f"Layer {fit.layer_id}: {e}")

    replay_optimizer = OptimizerConfig(Algorithm.SCHEDULED, schedules=schedules)
    replay_configs = [
        dlr_trial.with_changes(optimizer=replay_optimizer, seed=seed + seed_offset, stop_at_threshold=True)
        for seed in seeds
    ]
    replay_records = run_trials(replay_configs, train, test, workers=workers)
    logger.info(
        f"Replay cohort: {sum(r.reached for r in replay_records)}/{len(seeds)} runs reached the threshold"
    )

    return ReplayResult(
        dlr_records=tuple(dlr_records),
        averaged_traces=tuple(traces),
        fits=tuple(fits),
        replay_records=tuple(replay_records),
    )
