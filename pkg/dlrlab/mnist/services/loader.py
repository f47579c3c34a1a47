"""
MNIST Loader Service

Resolves the four standard MNIST files (pre-decompressed) from a data
directory or explicit paths and loads them into train/test Datasets.
"""

from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Dict, Optional, Tuple
import logging

from ..exceptions import MissingDataFileError
from .idx_reader import Dataset, load_idx_images, load_idx_labels

logger = logging.getLogger(__name__)

STANDARD_FILES = {
    'train_images': 'train-images-idx3-ubyte',
    'train_labels': 'train-labels-idx1-ubyte',
    'test_images': 't10k-images-idx3-ubyte',
    'test_labels': 't10k-labels-idx1-ubyte',
}


@dataclass(frozen=True)
class MnistPaths:
    train_images: Path
    train_labels: Path
    test_images: Path
    test_labels: Path

    @classmethod
    def resolve(cls, data_dir: Optional[str], overrides: Optional[Dict[str, Optional[str]]] = None) -> 'MnistPaths':
        """
        Builds the four paths, preferring explicit overrides over data_dir

        Raises:
            MissingDataFileError: If a file cannot be located
        """
        overrides = overrides or {}
        resolved = {}
        for key, filename in STANDARD_FILES.items():
            explicit = overrides.get(key)
            if explicit:
                path = Path(explicit)
            elif data_dir:
                path = Path(data_dir) / filename
            else:
                raise MissingDataFileError(f"{filename} (no --data-dir and DLRLAB_DATA_DIR is unset)")
            if not path.is_file():
                raise MissingDataFileError(path)
            resolved[key] = path
        return cls(**resolved)

    def as_dict(self) -> Dict[str, str]:
        return {key: str(value) for key, value in asdict(self).items()}


def load_dataset(images_path: Path, labels_path: Path) -> Dataset:
    with open(images_path, 'rb') as images_file:
        images = load_idx_images(images_file)
    with open(labels_path, 'rb') as labels_file:
        labels = load_idx_labels(labels_file)
    return Dataset.from_sets(images, labels)


def load_mnist(paths: MnistPaths) -> Tuple[Dataset, Dataset]:
    """Loads (train, test) Datasets"""
    train = load_dataset(paths.train_images, paths.train_labels)
    test = load_dataset(paths.test_images, paths.test_labels)
    logger.info(f"Loaded MNIST: {len(train)} training and {len(test)} test samples")
    return train, test
