"""
Small synthetic datasets for tests across apps.
"""

from pathlib import Path
from typing import Tuple

import numpy as np

from .services.idx_reader import Dataset, ImageSet, LabelSet, write_idx_images, write_idx_labels
from .services.loader import STANDARD_FILES


def make_synthetic_dataset(count: int, seed: int = 0, rows: int = 2, cols: int = 2) -> Dataset:
    """
    Learnable toy data: the label is the index of the brightest pixel,
    so only labels below rows*cols occur.
    """
    rng = np.random.default_rng(seed)
    raw = rng.integers(0, 120, size=(count, rows * cols), dtype=np.int64)
    labels = rng.integers(0, min(rows * cols, 10), size=count)
    raw[np.arange(count), labels] = 255
    pixels = (raw.astype(np.float32) / np.float32(255.0))
    return Dataset.from_sets(ImageSet(rows=rows, cols=cols, pixels=pixels), LabelSet(labels=labels))


def write_synthetic_mnist(directory, train_count: int = 200, test_count: int = 100,
                          seed: int = 0) -> Tuple[Dataset, Dataset]:
    """Writes the four standard IDX files of a synthetic split into directory"""
    directory = Path(directory)
    train = make_synthetic_dataset(train_count, seed=seed)
    test = make_synthetic_dataset(test_count, seed=seed + 1)
    for prefix, dataset in (('train', train), ('test', test)):
        with open(directory / STANDARD_FILES[f'{prefix}_images'], 'wb') as f:
            write_idx_images(dataset.images, f)
        with open(directory / STANDARD_FILES[f'{prefix}_labels'], 'wb') as f:
            write_idx_labels(dataset.labels, f)
    return train, test
