"""
Minimal Network Size Service

Shrinks the hidden layer from a starting size in fixed steps until an
algorithm stops reaching the threshold within the epoch budget. A size
succeeds when, under its best grid point, at least half of the seeds reach
the threshold.

Two answers are reported per algorithm: the smallest size of the unbroken
run of successes (majority vote), and each seed's own minimal size, the
smallest size down to which that seed reached the threshold (under any grid
point) at every scanned size.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple
import logging

from mnist.services.idx_reader import Dataset
from optimizers.services.optimizer import Algorithm, OptimizerConfig

from ..exceptions import ConfigurationError
from .speed_comparison import GridPointResult, evaluate_grid, select_best
from .statistics import SummaryStats, summarize
from .trainer import TrialConfig

logger = logging.getLogger(__name__)


def scan_sizes(start_size: int, size_step: int) -> List[int]:
    return list(range(start_size, 0, -size_step))


@dataclass(frozen=True)
class SizeOutcome:
    hidden_units: int
    succeeded: bool
    best: GridPointResult
    seeds_reached: Tuple[int, ...]

    def to_dict(self) -> Dict[str, object]:
        return {
            'hidden_units': self.hidden_units,
            'succeeded': self.succeeded,
            'best_params': self.best.optimizer.tuned_params(),
            'reached_runs': self.best.stats.count,
            'epochs_to_threshold': self.best.stats.to_dict(),
            'seeds_reached': list(self.seeds_reached),
        }


@dataclass(frozen=True)
class MinSizeResult:
    algorithm: Algorithm
    start_size: int
    seeds: Tuple[int, ...]
    outcomes: Tuple[SizeOutcome, ...] = ()
    per_seed_sizes: Tuple[Optional[int], ...] = field(default_factory=tuple)

    @property
    def start_fails(self) -> bool:
        return not self.outcomes or not self.outcomes[0].succeeded

    @property
    def minimal_size(self) -> Optional[int]:
        smallest = None
        for outcome in self.outcomes:
            if not outcome.succeeded:
                break
            smallest = outcome.hidden_units
        return smallest

    @property
    def per_seed_stats(self) -> SummaryStats:
        return summarize([float(size) if size is not None else None for size in self.per_seed_sizes])

    def to_dict(self) -> Dict[str, object]:
        return {
            'algorithm': self.algorithm.value,
            'start_size': self.start_size,
            'start_fails': self.start_fails,
            'minimal_size': self.minimal_size,
            'per_seed_sizes': dict(zip(map(str, self.seeds), self.per_seed_sizes)),
            'per_seed_minimal_size': self.per_seed_stats.to_dict(),
            'sizes': [outcome.to_dict() for outcome in self.outcomes],
        }


def _size_outcome(size: int, points: Sequence[GridPointResult], seeds: Sequence[int]) -> SizeOutcome:
    best = select_best(points)
    reached = set()
    for point in points:
        for seed, record in zip(seeds, point.records):
            if record.reached:
                reached.add(seed)
    return SizeOutcome(
        hidden_units=size,
        succeeded=2 * best.stats.count >= len(seeds),
        best=best,
        seeds_reached=tuple(seed for seed in seeds if seed in reached),
    )


def min_size_scan(grids: Mapping[Algorithm, Sequence[OptimizerConfig]], seeds: Sequence[int],
                  start_size: int, size_step: int, template: TrialConfig,
                  train: Dataset, test: Dataset, workers: int = 1) -> List[MinSizeResult]:
    """
    Scans start_size, start_size - size_step, ... (while positive) for every
    algorithm, stopping an algorithm at its first failing size

    The epoch budget is template.max_epochs. All algorithms still scanning
    at a size are trained together so the worker pool stays busy.

    Returns:
        One MinSizeResult per algorithm, in the order of grids. A failing
        start size is reported through MinSizeResult.start_fails.

    Raises:
        ConfigurationError: If grids or seeds are empty or sizes are not positive
    """
    if not grids or any(not points for points in grids.values()):
        raise ConfigurationError("Every algorithm needs at least one grid point")
    if not seeds:
        raise ConfigurationError("At least one seed is required")
    if start_size < 1 or size_step < 1:
        raise ConfigurationError(f"start_size and size_step must be positive, got {start_size} and {size_step}")

    outcomes: Dict[Algorithm, List[SizeOutcome]] = {algorithm: [] for algorithm in grids}
    per_seed: Dict[Algorithm, Dict[int, Optional[int]]] = {a: {s: None for s in seeds} for a in grids}
    alive_seeds: Dict[Algorithm, set] = {a: set(seeds) for a in grids}
    scanning = list(grids)

    for size in scan_sizes(start_size, size_step):
        if not scanning:
            break
        results = evaluate_grid({a: grids[a] for a in scanning}, [size], seeds, template, train, test, workers)
        still_scanning = []
        for algorithm in scanning:
            outcome = _size_outcome(size, results[(algorithm, size)], seeds)
            outcomes[algorithm].append(outcome)
            for seed in seeds:
                if seed in alive_seeds[algorithm] and seed in outcome.seeds_reached:
                    per_seed[algorithm][seed] = size
                else:
                    alive_seeds[algorithm].discard(seed)
            logger.info(
                f"{algorithm.value} h={size}: {outcome.best.stats.count}/{len(seeds)} runs reached "
                f"the threshold ({'success' if outcome.succeeded else 'failure'})"
            )
            if outcome.succeeded:
                still_scanning.append(algorithm)
            elif len(outcomes[algorithm]) == 1:
                logger.warning(f"{algorithm.value} fails at the starting size {size}")
        scanning = still_scanning

    return [
        MinSizeResult(
            algorithm=algorithm,
            start_size=start_size,
            seeds=tuple(seeds),
            outcomes=tuple(outcomes[algorithm]),
            per_seed_sizes=tuple(per_seed[algorithm][seed] for seed in seeds),
        )
        for algorithm in grids
    ]
