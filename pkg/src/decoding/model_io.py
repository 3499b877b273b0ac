# UDNN model files

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..utils.exceptions import FileAccessError, FormatError
from ..utils.fileio import atomic_write_bytes
from .mlp import Layer, MlpModel

logger = logging.getLogger("decoding.model_io")

MAGIC = b"UDNN"
VERSION = 1
PREAMBLE = struct.Struct("<4sII")  # magic, version, n_layers
ACTIVATION_IDS = {"sigmoid": 0, "softmax": 1}
ACTIVATION_NAMES = {v: k for k, v in ACTIVATION_IDS.items()}


def encode_model(model: MlpModel) -> bytes:
    """Serialize a model: preamble, layer dims, activation ids, then float32 W and b per layer."""
    n_layers = len(model.layers)
    parts = [
        PREAMBLE.pack(MAGIC, VERSION, n_layers),
        struct.pack(f"<{n_layers + 1}I", *model.layer_sizes),
        struct.pack(f"<{n_layers}I", *(ACTIVATION_IDS[layer.activation] for layer in model.layers)),
    ]
    for layer in model.layers:
        parts.append(np.ascontiguousarray(layer.weights, dtype="<f4").tobytes())
        parts.append(np.ascontiguousarray(layer.bias, dtype="<f4").tobytes())
    return b"".join(parts)


def decode_model(data: bytes, source: str = "<bytes>") -> MlpModel:
    """Parse UDNN bytes into a float64 model.

    Raises:
        FormatError: On bad magic, version, activation id or payload size
        ModelError: If the stored layers do not form a valid model
    """
    if len(data) < PREAMBLE.size:
        raise FormatError(f"{source}: truncated UDNN header")
    magic, version, n_layers = PREAMBLE.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{source}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{source}: unsupported UDNN version {version}")

    offset = PREAMBLE.size
    header_size = offset + 4 * (2 * n_layers + 1)
    if n_layers < 1 or len(data) < header_size:
        raise FormatError(f"{source}: truncated layer table")
    dims = struct.unpack_from(f"<{n_layers + 1}I", data, offset)
    offset += 4 * (n_layers + 1)
    activation_ids = struct.unpack_from(f"<{n_layers}I", data, offset)
    offset += 4 * n_layers

    expected = offset + 4 * sum(dims[k] * dims[k + 1] + dims[k + 1] for k in range(n_layers))
    if len(data) != expected:
        raise FormatError(f"{source}: payload is {len(data)} bytes, layer table implies {expected}")

    layers = []
    for k, activation_id in enumerate(activation_ids):
        if activation_id not in ACTIVATION_NAMES:
            raise FormatError(f"{source}: unknown activation id {activation_id} in layer {k}")
        n_in, n_out = dims[k], dims[k + 1]
        weights = np.frombuffer(data, dtype="<f4", count=n_in * n_out, offset=offset).reshape(n_in, n_out)
        offset += 4 * n_in * n_out
        bias = np.frombuffer(data, dtype="<f4", count=n_out, offset=offset)
        offset += 4 * n_out
        layers.append(Layer(weights.astype(np.float64), bias.astype(np.float64), ACTIVATION_NAMES[activation_id]))
    return MlpModel(layers)


def save_model(path: Union[str, Path], model: MlpModel) -> Path:
    """Atomically write a model file."""
    target = atomic_write_bytes(path, encode_model(model))
    logger.info(f"Saved model {model.layer_sizes} to {target}")
    return target


def load_model(path: Union[str, Path]) -> MlpModel:
    """Read a model file.

    Raises:
        FileAccessError: If the file cannot be read
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise FileAccessError(f"Cannot read model {path}: {e}") from e
    model = decode_model(data, str(path))
    logger.debug(f"Loaded model {model.layer_sizes} from {path}")
    return model


def quantize_model(model: MlpModel) -> MlpModel:
    """The model as it reads back from a file (parameters rounded to float32)."""
    return decode_model(encode_model(model))
