# UDFT binary matrix files for features, variances and posteriors

import logging
import struct
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..utils.exceptions import FileAccessError, FormatError
from ..utils.fileio import atomic_write_bytes

logger = logging.getLogger("features.feature_io")

MAGIC = b"UDFT"
VERSION = 1
HEADER = struct.Struct("<4sIIII")  # magic, version, T, dim, flags

FLAG_FEATURES = 0
FLAG_VARIANCES = 1
FLAG_POSTERIORS = 2
FLAG_NAMES = {FLAG_FEATURES: "features", FLAG_VARIANCES: "variances", FLAG_POSTERIORS: "posteriors"}


def encode_matrix(matrix: np.ndarray, flags: int = FLAG_FEATURES) -> bytes:
    """Serialize a T x dim matrix as header plus little-endian float32 rows."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise FormatError(f"UDFT stores 2-D matrices, got shape {matrix.shape}")
    if flags not in FLAG_NAMES:
        raise FormatError(f"Unknown UDFT flags {flags}")
    header = HEADER.pack(MAGIC, VERSION, matrix.shape[0], matrix.shape[1], flags)
    return header + np.ascontiguousarray(matrix, dtype="<f4").tobytes()


def decode_matrix(data: bytes, source: str = "<bytes>") -> Tuple[np.ndarray, int]:
    """Parse UDFT bytes.

    Returns:
        (float64 matrix, flags)

    Raises:
        FormatError: On bad magic, version, flags or payload size
    """
    if len(data) < HEADER.size:
        raise FormatError(f"{source}: truncated UDFT header")
    magic, version, frames, dim, flags = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{source}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{source}: unsupported UDFT version {version}")
    if flags not in FLAG_NAMES:
        raise FormatError(f"{source}: unknown flags {flags}")
    expected = HEADER.size + 4 * frames * dim
    if len(data) != expected:
        raise FormatError(f"{source}: payload is {len(data)} bytes, header implies {expected}")
    matrix = np.frombuffer(data, dtype="<f4", offset=HEADER.size).reshape(frames, dim)
    return matrix.astype(np.float64), flags


def write_matrix(path: Union[str, Path], matrix: np.ndarray, flags: int = FLAG_FEATURES) -> Path:
    """Atomically write a UDFT file."""
    target = atomic_write_bytes(path, encode_matrix(matrix, flags))
    logger.debug(f"Wrote {FLAG_NAMES[flags]} {np.shape(matrix)} to {target}")
    return target


def read_matrix(path: Union[str, Path], expected_flags: Optional[int] = None) -> np.ndarray:
    """Read a UDFT file, optionally checking what kind of matrix it holds.

    Raises:
        FileAccessError: If the file cannot be read
        FormatError: If the file is malformed or holds another kind of matrix
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise FileAccessError(f"Cannot read {path}: {e}") from e
    matrix, flags = decode_matrix(data, str(path))
    if expected_flags is not None and flags != expected_flags:
        raise FormatError(f"{path} holds {FLAG_NAMES[flags]}, expected {FLAG_NAMES[expected_flags]}")
    return matrix


def read_labels(path: Union[str, Path]) -> np.ndarray:
    """Read a label file: one integer class index per line."""
    path = Path(path)
    if not path.is_file():
        raise FileAccessError(f"Label file not found: {path}")
    try:
        labels = np.loadtxt(path, dtype=np.int64, ndmin=1)
    except ValueError as e:
        raise FormatError(f"Malformed label file {path}: {e}") from e
    return labels


def write_labels(path: Union[str, Path], labels: np.ndarray) -> Path:
    text = "".join(f"{int(label)}\n" for label in labels)
    return atomic_write_bytes(path, text.encode("utf-8"))
