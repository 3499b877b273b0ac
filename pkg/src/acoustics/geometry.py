# Microphone array geometry and its text file format

import itertools
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from ..config.config import DEFAULT_ARRAY_MICS, DEFAULT_ARRAY_SPACING, SPEED_OF_SOUND
from ..utils.exceptions import FileAccessError, FormatError, ValidationError
from ..utils.fileio import atomic_write
from ..utils.validators import validate_geometry

logger = logging.getLogger("acoustics.geometry")


@dataclass(frozen=True)
class ArrayGeometry:
    """Microphone coordinates in meters plus the speed of sound.

    Pairs are enumerated as the non-redundant combinations (i, j), i < j,
    in lexicographic order, so an 8-microphone array has 28 pairs.
    """

    mic_positions: np.ndarray
    speed_of_sound: float = SPEED_OF_SOUND
    _pairs: Tuple[Tuple[int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        positions = np.array(self.mic_positions, dtype=float)
        is_valid, issues = validate_geometry(positions)
        if not is_valid:
            raise ValidationError(f"Invalid array geometry: {', '.join(issues)}")
        if not (math.isfinite(self.speed_of_sound) and self.speed_of_sound > 0):
            raise ValidationError(f"Speed of sound must be positive, got {self.speed_of_sound}")
        positions.setflags(write=False)
        object.__setattr__(self, "mic_positions", positions)
        object.__setattr__(self, "_pairs", tuple(itertools.combinations(range(positions.shape[0]), 2)))

    @property
    def num_mics(self) -> int:
        return self.mic_positions.shape[0]

    @property
    def pairs(self) -> Tuple[Tuple[int, int], ...]:
        return self._pairs

    @property
    def num_pairs(self) -> int:
        return len(self._pairs)

    def pair_distance(self, pair: int) -> float:
        """Distance in meters between the microphones of pair index ``pair``."""
        if not 0 <= pair < self.num_pairs:
            raise ValidationError(f"Pair index {pair} out of range [0, {self.num_pairs})")
        i, j = self._pairs[pair]
        return float(np.linalg.norm(self.mic_positions[i] - self.mic_positions[j]))

    def arrival_delays(self, doa: Tuple[float, float]) -> np.ndarray:
        """Per-microphone arrival delays (s) of a plane wave relative to the origin.

        Args:
            doa: (azimuth, elevation) of the source in radians

        Returns:
            Array of C delays; microphones closer to the source have smaller delays
        """
        return -(self.mic_positions @ unit_vector(doa)) / self.speed_of_sound

    def __eq__(self, other) -> bool:
        if not isinstance(other, ArrayGeometry):
            return NotImplemented
        return (self.speed_of_sound == other.speed_of_sound
                and np.array_equal(self.mic_positions, other.mic_positions))

    def __hash__(self) -> int:
        return hash((self.mic_positions.tobytes(), self.speed_of_sound))


def unit_vector(doa: Tuple[float, float]) -> np.ndarray:
    """Unit vector pointing from the array origin toward (azimuth, elevation)."""
    azimuth, elevation = doa
    return np.array([
        math.cos(elevation) * math.cos(azimuth),
        math.cos(elevation) * math.sin(azimuth),
        math.sin(elevation),
    ])


def circular_array(num_mics: int = DEFAULT_ARRAY_MICS,
                   spacing: float = DEFAULT_ARRAY_SPACING,
                   speed_of_sound: float = SPEED_OF_SOUND) -> ArrayGeometry:
    """Uniform circular array in the horizontal plane with given adjacent spacing.

    The default (8 microphones, 8 cm) is an assumed stand-in for the
    circular array used in reverberant ASR benchmarks; exact coordinates of
    that array are not published.
    """
    if num_mics < 2:
        raise ValidationError("A circular array needs at least 2 microphones")
    radius = spacing / (2.0 * math.sin(math.pi / num_mics))
    angles = 2.0 * math.pi * np.arange(num_mics) / num_mics
    positions = np.stack([radius * np.cos(angles), radius * np.sin(angles), np.zeros(num_mics)], axis=1)
    return ArrayGeometry(positions, speed_of_sound)


def linear_array(num_mics: int, spacing: float, speed_of_sound: float = SPEED_OF_SOUND) -> ArrayGeometry:
    """Uniform linear array along the x axis, centered on the origin."""
    offsets = (np.arange(num_mics) - (num_mics - 1) / 2.0) * spacing
    positions = np.stack([offsets, np.zeros(num_mics), np.zeros(num_mics)], axis=1)
    return ArrayGeometry(positions, speed_of_sound)


def load_geometry(path: Union[str, Path], speed_of_sound: float = SPEED_OF_SOUND) -> ArrayGeometry:
    """Read a geometry text file: one ``x y z`` line per microphone, ``#`` comments.

    Raises:
        FileAccessError: If the file cannot be read
        FormatError: If the contents are not a C x 3 table of numbers
    """
    path = Path(path)
    if not path.is_file():
        raise FileAccessError(f"Geometry file not found: {path}")
    try:
        positions = np.loadtxt(path, comments="#", ndmin=2)
    except ValueError as e:
        raise FormatError(f"Malformed geometry file {path}: {e}") from e
    if positions.shape[1] != 3:
        raise FormatError(f"Geometry file {path} must have 3 columns, got {positions.shape[1]}")
    logger.debug(f"Loaded {positions.shape[0]} microphone positions from {path}")
    return ArrayGeometry(positions, speed_of_sound)


def save_geometry(geometry: ArrayGeometry, path: Union[str, Path]) -> Path:
    """Write a geometry text file readable by :func:`load_geometry`."""
    header = f"microphone positions in meters (x y z), {geometry.num_mics} mics"
    return atomic_write(path, lambda tmp: np.savetxt(tmp, geometry.mic_positions, fmt="%.9f", header=header))


def geometry_to_list(geometry: ArrayGeometry) -> List[List[float]]:
    """Plain nested-list form used in JSON sidecars."""
    return geometry.mic_positions.tolist()
