# Counter-based random streams shared by every stochastic component

import hashlib
from typing import Union

import numpy as np

Label = Union[str, int]


def derive_key(seed: int, *labels: Label) -> int:
    """Derive a 128-bit Philox key from a run seed and a stream path.

    The key is the little-endian integer of a BLAKE2b-128 digest over
    ``"<seed>/<label>/<label>..."``. Distinct label paths give statistically
    independent streams; the same path always gives the same stream.

    Args:
        seed: The run seed (the CLI ``--seed``)
        *labels: Stream path components, e.g. ``("distortion", 17)``

    Returns:
        Integer key in [0, 2**128)
    """
    path = "/".join([str(int(seed))] + [str(label) for label in labels])
    digest = hashlib.blake2b(path.encode("utf-8"), digest_size=16).digest()
    return int.from_bytes(digest, "little")


def philox_generator(seed: int, *labels: Label) -> np.random.Generator:
    """Create a Philox4x64-10 generator for the given stream path."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *labels)))


def derive_seed(seed: int, *labels: Label) -> int:
    """Derive a non-negative 63-bit run seed for a sub-task, e.g. one utterance."""
    return derive_key(seed, *labels) & (2 ** 63 - 1)
