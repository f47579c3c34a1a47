"""
Speed Comparison Service

For every algorithm and network size, trains each grid point over the same
seeds, keeps the point that reaches the threshold fastest on average, and
reports its epochs-to-threshold statistics next to the ratio to plain SGD.
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple
import logging

from mnist.services.idx_reader import Dataset
from optimizers.services.optimizer import Algorithm, OptimizerConfig

from ..exceptions import ConfigurationError
from .runner import run_trials
from .statistics import SummaryStats, summarize
from .trainer import TrialConfig, TrialRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridPointResult:
    optimizer: OptimizerConfig
    hidden_units: int
    records: Tuple[TrialRecord, ...]
    stats: SummaryStats

    def rank_key(self) -> Tuple:
        """Fewest not-reached runs, then lowest mean, then parameter order"""
        mean = self.stats.mean if self.stats.mean is not None else float('inf')
        return (self.stats.not_reached, mean, self.optimizer.sort_key())


@dataclass(frozen=True)
class SpeedRow:
    algorithm: Algorithm
    hidden_units: int
    best: GridPointResult
    points: Tuple[GridPointResult, ...]
    ratio_to_sgd: Optional[float] = None

    @property
    def stats(self) -> SummaryStats:
        return self.best.stats

    @property
    def reached(self) -> bool:
        return self.best.stats.count > 0

    def to_dict(self) -> Dict[str, object]:
        return {
            'algorithm': self.algorithm.value,
            'hidden_units': self.hidden_units,
            'best_params': self.best.optimizer.tuned_params(),
            'epochs_to_threshold': self.stats.to_dict(),
            'ratio_to_sgd': self.ratio_to_sgd,
            'grid_points': len(self.points),
        }


def select_best(points: Sequence[GridPointResult]) -> GridPointResult:
    """Exhaustive: the minimum of rank_key, so grid order never matters"""
    return min(points, key=GridPointResult.rank_key)


def evaluate_grid(grids: Mapping[Algorithm, Sequence[OptimizerConfig]], sizes: Sequence[int],
                  seeds: Sequence[int], template: TrialConfig, train: Dataset, test: Dataset,
                  workers: int = 1) -> Dict[Tuple[Algorithm, int], List[GridPointResult]]:
    """
    Trains every (algorithm, size, grid point, seed) combination in one batch
    of trials and groups the records per grid point
    """
    jobs = []
    for algorithm, points in grids.items():
        for size in sizes:
            for optimizer in points:
                jobs.append((algorithm, size, optimizer))

    configs = [
        template.with_changes(hidden_units=size, optimizer=optimizer, seed=seed)
        for _, size, optimizer in jobs
        for seed in seeds
    ]
    for config in configs:
        config.validate()
    records = run_trials(configs, train, test, workers=workers)

    results: Dict[Tuple[Algorithm, int], List[GridPointResult]] = {}
    for index, (algorithm, size, optimizer) in enumerate(jobs):
        chunk = tuple(records[index * len(seeds):(index + 1) * len(seeds)])
        stats = summarize([record.epochs_to_threshold for record in chunk])
        results.setdefault((algorithm, size), []).append(
            GridPointResult(optimizer=optimizer, hidden_units=size, records=chunk, stats=stats)
        )
    return results


def speed_comparison(grids: Mapping[Algorithm, Sequence[OptimizerConfig]], sizes: Sequence[int],
                     seeds: Sequence[int], template: TrialConfig, train: Dataset, test: Dataset,
                     workers: int = 1) -> List[SpeedRow]:
    """
    Best-grid-point epochs-to-threshold per algorithm and size

    Args:
        grids: Grid points per algorithm (see grids.resolve_grids)
        sizes: Hidden-layer sizes
        seeds: Seeds shared by every grid point
        template: Trial settings (batch, threshold, budget, eval interval)
        train: Training split
        test: Evaluation split
        workers: Process count

    Returns:
        Rows in algorithm then size order. ratio_to_sgd is the best mean over
        SGD's best mean at the same size, when SGD is in the grids and both
        reached the threshold.

    Raises:
        ConfigurationError: If grids, sizes or seeds are empty
    """
    if not grids or any(not points for points in grids.values()):
        raise ConfigurationError("Every algorithm needs at least one grid point")
    if not sizes:
        raise ConfigurationError("At least one network size is required")
    if not seeds:
        raise ConfigurationError("At least one seed is required")

    results = evaluate_grid(grids, sizes, seeds, template, train, test, workers=workers)

    rows = []
    for algorithm in grids:
        for size in sizes:
            points = results[(algorithm, size)]
            best = select_best(points)
            if best.stats.count == 0:
                logger.warning(f"No {algorithm.value} grid point reached the threshold at h={size}")
            rows.append(SpeedRow(algorithm=algorithm, hidden_units=size, best=best, points=tuple(points)))

    sgd_means = {
        row.hidden_units: row.stats.mean for row in rows
        if row.algorithm is Algorithm.SGD and row.stats.mean is not None
    }
    with_ratios = []
    for row in rows:
        sgd_mean = sgd_means.get(row.hidden_units)
        ratio = row.stats.mean / sgd_mean if sgd_mean and row.stats.mean is not None else None
        with_ratios.append(SpeedRow(algorithm=row.algorithm, hidden_units=row.hidden_units,
                                    best=row.best, points=row.points, ratio_to_sgd=ratio))
    return with_ratios
