"""
IDX Reader Service

Parses the big-endian IDX containers MNIST is distributed in, normalizes
pixels into [0, 1] and builds one-hot encoded Datasets. Writers for the same
format live here too so synthetic files can be produced for fixtures.
"""

from dataclasses import dataclass
from typing import BinaryIO
import logging
import struct

import numpy as np

from ..exceptions import CountMismatchError, IdxFormatError, IdxTruncatedError, LabelRangeError

logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
NUM_CLASSES = 10
PIXEL_SCALE = 255.0

# Pixels are stored as float32; weights and gradients stay float64.
PIXEL_DTYPE = np.float32


@dataclass(frozen=True)
class ImageSet:
    """count x (rows*cols) pixel matrix with values in [0, 1]"""
    rows: int
    cols: int
    pixels: np.ndarray

    @property
    def count(self) -> int:
        return int(self.pixels.shape[0])


@dataclass(frozen=True)
class LabelSet:
    labels: np.ndarray

    @property
    def count(self) -> int:
        return int(self.labels.shape[0])


@dataclass(frozen=True)
class Dataset:
    """Images, integer labels and their one-hot targets"""
    images: ImageSet
    labels: LabelSet
    targets: np.ndarray

    @classmethod
    def from_sets(cls, images: ImageSet, labels: LabelSet) -> 'Dataset':
        """
        Pairs an ImageSet with its LabelSet and derives the one-hot targets

        Raises:
            CountMismatchError: If the two sets disagree on the sample count
        """
        if images.count != labels.count:
            raise CountMismatchError(
                f"Image count {images.count} does not match label count {labels.count}"
            )
        return cls(images=images, labels=labels, targets=one_hot_matrix(labels.labels))

    def __len__(self) -> int:
        return self.images.count

    @property
    def x(self) -> np.ndarray:
        return self.images.pixels

    @property
    def y(self) -> np.ndarray:
        return self.targets


def _read_exact(source: BinaryIO, size: int, what: str) -> bytes:
    data = source.read(size)
    if len(data) < size:
        raise IdxTruncatedError(f"Truncated {what}: expected {size} bytes, got {len(data)}")
    return data


def _read_header(source: BinaryIO, magic: int, fields: int) -> tuple:
    header_size = 4 * (fields + 1)
    raw = source.read(header_size)
    if len(raw) < header_size:
        raise IdxFormatError(f"IDX header too short: {len(raw)} of {header_size} bytes")
    found, *values = struct.unpack(f'>{fields + 1}I', raw)
    if found != magic:
        raise IdxFormatError(f"Wrong IDX magic number 0x{found:08x}, expected 0x{magic:08x}")
    return tuple(values)


def load_idx_images(source: BinaryIO) -> ImageSet:
    """
    Reads an IDX image stream

    Args:
        source: Binary stream positioned at the IDX header

    Returns:
        ImageSet with raw bytes divided by 255

    Raises:
        IdxFormatError: If the magic number is not 0x00000803
        IdxTruncatedError: If fewer than count*rows*cols pixel bytes follow
    """
    count, rows, cols = _read_header(source, IMAGE_MAGIC, 3)
    payload = _read_exact(source, count * rows * cols, 'image payload')
    raw = np.frombuffer(payload, dtype=np.uint8).reshape(count, rows * cols)
    pixels = raw.astype(PIXEL_DTYPE) / PIXEL_DTYPE(PIXEL_SCALE)

    logger.debug(f"Loaded {count} images of {rows}x{cols}")
    return ImageSet(rows=rows, cols=cols, pixels=pixels)


def load_idx_labels(source: BinaryIO) -> LabelSet:
    """
    Reads an IDX label stream

    Raises:
        IdxFormatError: If the magic number is not 0x00000801
        IdxTruncatedError: If fewer than count label bytes follow
        LabelRangeError: If any label byte is above 9
    """
    (count,) = _read_header(source, LABEL_MAGIC, 1)
    payload = _read_exact(source, count, 'label payload')
    labels = np.frombuffer(payload, dtype=np.uint8).astype(np.int64)

    if labels.size and labels.max() >= NUM_CLASSES:
        bad = int(np.argmax(labels >= NUM_CLASSES))
        raise LabelRangeError(f"Label {labels[bad]} at index {bad} is outside [0, 9]")

    logger.debug(f"Loaded {count} labels")
    return LabelSet(labels=labels)


def write_idx_images(images: ImageSet, sink: BinaryIO) -> None:
    """Writes pixels back as IDX bytes (pixel * 255, rounded)"""
    sink.write(struct.pack('>4I', IMAGE_MAGIC, images.count, images.rows, images.cols))
    raw = np.rint(np.asarray(images.pixels, dtype=np.float64) * PIXEL_SCALE)
    sink.write(np.clip(raw, 0, 255).astype(np.uint8).tobytes())


def write_idx_labels(labels: LabelSet, sink: BinaryIO) -> None:
    sink.write(struct.pack('>2I', LABEL_MAGIC, labels.count))
    sink.write(np.asarray(labels.labels, dtype=np.uint8).tobytes())


def one_hot(label: int) -> np.ndarray:
    """
    Encodes a single label as a length-10 target vector

    Raises:
        LabelRangeError: If label is outside [0, 9]
    """
    if not 0 <= int(label) < NUM_CLASSES:
        raise LabelRangeError(f"Label {label} is outside [0, 9]")
    target = np.zeros(NUM_CLASSES)
    target[int(label)] = 1.0
    return target


def one_hot_matrix(labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= NUM_CLASSES):
        raise LabelRangeError("Labels must lie in [0, 9]")
    targets = np.zeros((labels.shape[0], NUM_CLASSES))
    targets[np.arange(labels.shape[0]), labels] = 1.0
    return targets
