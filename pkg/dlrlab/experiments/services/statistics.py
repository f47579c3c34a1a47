"""
Summary statistics over trial outcomes
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import CheckpointGridError, EmptySummaryError


@dataclass(frozen=True)
class SummaryStats:
    count: int
    mean: Optional[float] = None
    std: Optional[float] = None
    median: Optional[float] = None
    not_reached: int = 0

    @property
    def degenerate(self) -> bool:
        """True when there are too few values for a spread"""
        return self.count < 2

    def to_dict(self) -> Dict[str, object]:
        return {
            'count': self.count,
            'mean': self.mean,
            'std': self.std,
            'median': self.median,
            'not_reached': self.not_reached,
        }


def summarize(values: Sequence[Optional[float]]) -> SummaryStats:
    """
    Mean, sample standard deviation (n-1) and median of the reached values

    None entries are not-reached outcomes: excluded from the aggregates and
    counted in not_reached. The std is absent for fewer than two values.

    Raises:
        EmptySummaryError: If values is empty
    """
    if len(values) == 0:
        raise EmptySummaryError("Cannot summarize an empty list of outcomes")
    reached = np.array([v for v in values if v is not None], dtype=np.float64)
    not_reached = len(values) - reached.size
    if reached.size == 0:
        return SummaryStats(count=0, not_reached=not_reached)
    return SummaryStats(
        count=int(reached.size),
        mean=float(np.mean(reached)),
        std=float(np.std(reached, ddof=1)) if reached.size > 1 else None,
        median=float(np.median(reached)),
        not_reached=not_reached,
    )


def median_curve(records: Sequence) -> List[Tuple[float, float]]:
    """
    Pointwise median test accuracy across runs, up to the last checkpoint
    every run still has

    Raises:
        EmptySummaryError: If no records are given
        CheckpointGridError: If the runs were evaluated at different times
    """
    if not records:
        raise EmptySummaryError("Cannot take the median curve of no records")
    length = min(len(record.curve) for record in records)
    times = [t for t, _ in records[0].curve[:length]]
    for record in records[1:]:
        if [t for t, _ in record.curve[:length]] != times:
            raise CheckpointGridError(
                f"Run {record.run_id} was evaluated on a different checkpoint grid"
            )
    if length == 0:
        return []
    accuracies = np.array([[acc for _, acc in record.curve[:length]] for record in records])
    medians = np.median(accuracies, axis=0)
    return [(t, float(m)) for t, m in zip(times, medians)]
