# Validator functions for signals, geometries and decoding inputs

import math
from typing import List, Sequence, Tuple

import numpy as np

from .exceptions import DimensionError, ValidationError

def validate_geometry(mic_positions: np.ndarray) -> Tuple[bool, List[str]]:
    """Validate microphone coordinates for basic array criteria.

    Args:
        mic_positions: Array of shape (C, 3) with coordinates in meters

    Returns:
        A tuple containing (is_valid, list_of_issues)
    """
    issues = []
    positions = np.asarray(mic_positions, dtype=float)

    if positions.ndim != 2 or positions.shape[1] != 3:
        issues.append(f"Microphone positions must have shape (C, 3), got {positions.shape}")
        return False, issues

    if positions.shape[0] < 2:
        issues.append("At least 2 microphones are required")

    if not np.all(np.isfinite(positions)):
        issues.append("Microphone coordinates must be finite")

    # Coincident microphones make a pair distance of zero
    for i in range(positions.shape[0]):
        for j in range(i + 1, positions.shape[0]):
            if np.linalg.norm(positions[i] - positions[j]) <= 0.0:
                issues.append(f"Microphones {i} and {j} coincide")

    return len(issues) == 0, issues

def validate_doa(doa: Sequence[float]) -> Tuple[float, float]:
    """Check a (azimuth, elevation) pair in radians.

    Raises:
        ValidationError: If the pair is malformed or non-finite
    """
    if len(doa) != 2:
        raise ValidationError(f"DOA must be (azimuth, elevation), got {tuple(doa)}")
    azimuth, elevation = float(doa[0]), float(doa[1])
    if not (math.isfinite(azimuth) and math.isfinite(elevation)):
        raise ValidationError(f"DOA must be finite, got ({azimuth}, {elevation})")
    return azimuth, elevation

def validate_forgetting_factor(forgetting_factor: float) -> float:
    """Require 0 < lambda < 1 for recursive averaging."""
    if not 0.0 < forgetting_factor < 1.0:
        raise ValidationError(f"Forgetting factor must lie in (0, 1), got {forgetting_factor}")
    return float(forgetting_factor)

def validate_count(value: int, minimum: int, name: str) -> int:
    """Require an integer count of at least ``minimum``."""
    if int(value) != value or value < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}, got {value}")
    return int(value)

def validate_same_length(name: str, *arrays: np.ndarray) -> int:
    """Require all arrays to share their leading dimension.

    Raises:
        DimensionError: If the leading dimensions differ
    """
    lengths = {np.shape(a)[0] for a in arrays}
    if len(lengths) != 1:
        raise DimensionError(f"{name}: inconsistent frame counts {sorted(lengths)}")
    return lengths.pop()

def validate_width(array: np.ndarray, expected: int, name: str) -> None:
    """Require the trailing dimension of an array to equal ``expected``."""
    width = np.shape(array)[-1]
    if width != expected:
        raise DimensionError(f"{name}: expected width {expected}, got {width}")


def validate_probability_rows(posteriors: np.ndarray, atol: float = 1e-6) -> Tuple[bool, List[str]]:
    """Check that every row of a posterior matrix lies on the simplex.

    Args:
        posteriors: Array whose last axis indexes classes
        atol: Tolerance on the row sums

    Returns:
        A tuple containing (is_valid, list_of_issues)
    """
    issues = []
    p = np.asarray(posteriors, dtype=float)

    if not np.all(np.isfinite(p)):
        issues.append("Posteriors contain non-finite values")
    if np.any(p < 0.0):
        issues.append(f"Posteriors contain negative entries (min {p.min():.3g})")
    sums = p.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > atol):
        issues.append(f"Posterior rows do not sum to 1 (max deviation {np.max(np.abs(sums - 1.0)):.3g})")

    return len(issues) == 0, issues
