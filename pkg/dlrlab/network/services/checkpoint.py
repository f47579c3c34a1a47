"""
Weight checkpoints.

Layout (version 1):
    4 bytes   magic b'DLRW'
    uint32    version
    uint32    D, H, K
    int64     init seed
    (all header integers big-endian)
    H*D float64 little-endian   w1, row-major
    K*H float64 little-endian   w2, row-major
"""

from pathlib import Path
from typing import Tuple
import struct

import numpy as np

from ..exceptions import CheckpointFormatError
from .mlp import Mlp

MAGIC = b'DLRW'
VERSION = 1
HEADER = struct.Struct('>4sIIIIq')
WEIGHT_DTYPE = np.dtype('<f8')


def save_checkpoint(net: Mlp, seed: int, path) -> Path:
    path = Path(path)
    header = HEADER.pack(MAGIC, VERSION, net.input_units, net.hidden_units, net.output_units, seed)
    with open(path, 'wb') as sink:
        sink.write(header)
        sink.write(np.ascontiguousarray(net.w1, dtype=WEIGHT_DTYPE).tobytes())
        sink.write(np.ascontiguousarray(net.w2, dtype=WEIGHT_DTYPE).tobytes())
    return path


def load_checkpoint(path) -> Tuple[Mlp, int]:
    """
    Reads a checkpoint back

    Returns:
        Tuple of (network, seed)

    Raises:
        CheckpointFormatError: On a bad magic, unknown version or short payload
    """
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise CheckpointFormatError(f"{path}: file too short for a checkpoint header")

    magic, version, d, h, k, seed = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointFormatError(f"{path}: not a weight checkpoint")
    if version != VERSION:
        raise CheckpointFormatError(f"{path}: unsupported checkpoint version {version}")

    expected = HEADER.size + WEIGHT_DTYPE.itemsize * (h * d + k * h)
    if len(data) != expected:
        raise CheckpointFormatError(f"{path}: expected {expected} bytes, found {len(data)}")

    values = np.frombuffer(data, dtype=WEIGHT_DTYPE, offset=HEADER.size).astype(np.float64)
    w1 = values[:h * d].reshape(h, d)
    w2 = values[h * d:].reshape(k, h)
    return Mlp(w1=w1, w2=w2), seed
