# Recursive auto-/cross-power spectra and complex spatial coherence

import logging
from dataclasses import dataclass
from typing import Iterator, List, Sequence

import numpy as np
from scipy.signal import lfilter

from ..acoustics.geometry import ArrayGeometry
from ..acoustics.scene import MultichannelSignal
from ..config.config import POWER_EPSILON
from ..utils.exceptions import DimensionError, ValidationError
from ..utils.validators import validate_forgetting_factor
from .stft import Spectrogram, StftConfig, stft

logger = logging.getLogger("frontend.coherence")


@dataclass
class CoherenceFrame:
    """Complex coherence of all M pairs for one frame (M x K)."""

    gamma: np.ndarray
    frame_index: int


def recursive_average(values: np.ndarray, forgetting_factor: float) -> np.ndarray:
    """First-order recursive smoothing along axis 0.

    y[n] = lambda * y[n-1] + (1 - lambda) * x[n], started at y[0] = x[0].
    """
    lam = forgetting_factor
    smoothed, _ = lfilter([1.0 - lam], [1.0, -lam], values, axis=0, zi=lam * values[:1])
    return smoothed


def _check_pair(spec_a: Spectrogram, spec_b: Spectrogram) -> None:
    if spec_a.config != spec_b.config:
        raise DimensionError("Spectrograms were computed with different STFT configs")
    if spec_a.frames.shape != spec_b.frames.shape:
        raise DimensionError(f"Frame counts differ: {spec_a.frames.shape} vs {spec_b.frames.shape}")


def _normalize(cross: np.ndarray, auto_a: np.ndarray, auto_b: np.ndarray, floor: float) -> np.ndarray:
    product = auto_a * auto_b
    gamma = np.zeros_like(cross)
    live = product > floor
    gamma[live] = cross[live] / np.sqrt(product[live])
    magnitude = np.abs(gamma)
    over = magnitude > 1.0
    gamma[over] /= magnitude[over]
    return gamma


def coherence(spec_a: Spectrogram, spec_b: Spectrogram, forgetting_factor: float) -> np.ndarray:
    """Recursively averaged complex coherence of two channels.

    Cells whose PSD product falls below 1e-12 times the product of the two
    mean frame powers are set to 0; magnitudes above 1 are clamped to 1.

    Args:
        spec_a: First channel
        spec_b: Second channel, same config and frame count
        forgetting_factor: lambda in (0, 1)

    Returns:
        T x K complex array, row n being the coherence at frame n

    Raises:
        ValidationError: If lambda is outside (0, 1)
        DimensionError: If the spectrograms are incompatible
    """
    lam = validate_forgetting_factor(forgetting_factor)
    _check_pair(spec_a, spec_b)
    a, b = spec_a.frames, spec_b.frames

    power_a = np.abs(a) ** 2
    power_b = np.abs(b) ** 2
    auto_a = recursive_average(power_a, lam)
    auto_b = recursive_average(power_b, lam)
    cross = recursive_average(a * np.conj(b), lam)

    floor = POWER_EPSILON * float(np.mean(power_a)) * float(np.mean(power_b))
    return _normalize(cross, auto_a, auto_b, floor)


def array_coherence(spectrograms: Sequence[Spectrogram], geometry: ArrayGeometry,
                    forgetting_factor: float) -> np.ndarray:
    """Coherence of every microphone pair of the array.

    Returns:
        M x T x K complex array ordered like ``geometry.pairs``
    """
    if len(spectrograms) != geometry.num_mics:
        raise DimensionError(f"Got {len(spectrograms)} spectrograms for {geometry.num_mics} microphones")
    return np.stack([coherence(spectrograms[i], spectrograms[j], forgetting_factor) for i, j in geometry.pairs])


def coherence_frames(pair_coherence: np.ndarray) -> Iterator[CoherenceFrame]:
    """Iterate an M x T x K coherence array frame by frame."""
    for n in range(pair_coherence.shape[1]):
        yield CoherenceFrame(pair_coherence[:, n, :], n)


def long_term_coherence(spec_a: Spectrogram, spec_b: Spectrogram) -> np.ndarray:
    """Coherence averaged over the whole duration (the lambda -> 1 limit).

    Returns:
        Length-K complex vector
    """
    _check_pair(spec_a, spec_b)
    a, b = spec_a.frames, spec_b.frames
    auto_a = np.sum(np.abs(a) ** 2, axis=0)
    auto_b = np.sum(np.abs(b) ** 2, axis=0)
    cross = np.sum(a * np.conj(b), axis=0)
    floor = POWER_EPSILON * float(np.mean(auto_a)) * float(np.mean(auto_b))
    return _normalize(cross, auto_a, auto_b, floor)


def gamma_diff(geometry: ArrayGeometry, pair: int, config: StftConfig) -> np.ndarray:
    """Coherence of a spherically isotropic field for omnidirectional microphones.

    Gamma_diff(f) = sin(2 pi f d / c) / (2 pi f d / c) with d the pair spacing.
    Negative sinc lobes are kept; see ``clamp_gamma_diff`` for the CDR input.

    Raises:
        ValidationError: If ``pair`` is not a valid pair index
    """
    distance = geometry.pair_distance(pair)
    return np.sinc(2.0 * config.band_frequencies() * distance / geometry.speed_of_sound)


def equal_spacing_pairs(geometry: ArrayGeometry, pair: int, tolerance: float = 1e-6) -> List[int]:
    """Indices of all pairs whose spacing matches that of ``pair`` within ``tolerance`` meters."""
    distance = geometry.pair_distance(pair)
    return [p for p in range(geometry.num_pairs) if abs(geometry.pair_distance(p) - distance) <= tolerance]


def isotropy_check(signal: MultichannelSignal, config: StftConfig, pair: int = 0,
                   pool_equal_spacing: bool = True) -> float:
    """Largest deviation of measured long-term coherence from Gamma_diff.

    Bands are restricted to omega d / c < 2 pi, where the sinc still carries
    most of its structure. The measured coherence is compared on its real
    part since the analytic field coherence is real. With
    ``pool_equal_spacing`` the real coherence is averaged over every pair
    with the same spacing as ``pair``; an isotropic field gives them all the
    same Gamma_diff.

    Returns:
        Maximum absolute deviation over the evaluated bands
    """
    if signal.geometry is None:
        raise ValidationError("Isotropy check needs the array geometry of the signal")
    geometry = signal.geometry
    distance = geometry.pair_distance(pair)
    pooled = equal_spacing_pairs(geometry, pair) if pool_equal_spacing else [pair]

    spectrograms: List[Spectrogram] = stft(signal, config)
    measured = np.mean(
        [long_term_coherence(spectrograms[geometry.pairs[p][0]], spectrograms[geometry.pairs[p][1]]).real
         for p in pooled],
        axis=0,
    )
    analytic = gamma_diff(geometry, pair, config)

    bands = config.band_frequencies() * distance / geometry.speed_of_sound < 1.0
    deviation = float(np.max(np.abs(measured[bands] - analytic[bands])))
    logger.info(
        f"Isotropy check on pair {pair} (d={distance:.3f} m, {len(pooled)} pairs pooled): "
        f"max deviation {deviation:.4f} over {int(bands.sum())} bands"
    )
    return deviation
