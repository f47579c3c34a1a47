"""
Seeded minibatch planning.

Every epoch draws its own permutation from SeedSequence([seed, epoch_index]),
so a trial can regenerate any epoch's order without storing it.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from ..exceptions import BatchingError
from .idx_reader import Dataset

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class BatchPlan:
    batch_size: int
    seed: int
    epoch_index: int
    order: np.ndarray

    def batches(self) -> List[np.ndarray]:
        """Splits the order into consecutive batches; the last one may be short"""
        return [
            self.order[start:start + self.batch_size]
            for start in range(0, self.order.shape[0], self.batch_size)
        ]


def epoch_rng(seed: int, epoch_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & SEED_MASK, epoch_index]))


def make_batch_plan(count: int, batch_size: int, seed: int, epoch_index: int) -> BatchPlan:
    if batch_size < 1:
        raise BatchingError(f"batch_size must be at least 1, got {batch_size}")
    if count < 1:
        raise BatchingError("Cannot batch an empty dataset")
    order = epoch_rng(seed, epoch_index).permutation(count)
    return BatchPlan(batch_size=batch_size, seed=seed, epoch_index=epoch_index, order=order)


def make_batches(dataset: Dataset, batch_size: int, seed: int, epoch_index: int) -> List[np.ndarray]:
    """
    Index batches for one epoch of dataset

    Args:
        dataset: Nonempty Dataset
        batch_size: Positive batch size
        seed: 64-bit trial seed
        epoch_index: Epoch number, mixed into the shuffle seed

    Returns:
        Batches that partition a permutation of range(len(dataset))

    Raises:
        BatchingError: If batch_size < 1 or the dataset is empty
    """
    return make_batch_plan(len(dataset), batch_size, seed, epoch_index).batches()
