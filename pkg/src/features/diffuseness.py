# DOA-independent coherent-to-diffuse ratio and pooled diffuseness features

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..acoustics.geometry import ArrayGeometry
from ..config.config import CDR_MAX, FORGETTING_FACTOR, GAMMA_DIFF_MODE, VARIANCE_SCALE
from ..frontend.coherence import array_coherence, gamma_diff
from ..frontend.stft import Spectrogram
from ..utils.exceptions import DimensionError, ValidationError
from .melbank import MelFilterbank, build_mel_filterbank, project_pair

logger = logging.getLogger("features.diffuseness")

ArrayLike = Union[float, complex, np.ndarray]

GAMMA_DIFF_MODES = ("clip", "abs")

# |Gamma|^2 - 1 above this counts as fully coherent
SINGULAR_TOLERANCE = 1e-12


def cdr_from_coherence(gamma: ArrayLike, gamma_diff: ArrayLike, cdr_max: float = CDR_MAX) -> ArrayLike:
    """Estimate the coherent-to-diffuse ratio without knowledge of the DOA.

    With observed coherence G and diffuse coherence Gd the estimate is

        (Gd Re{G} - |G|^2 - sqrt(Gd^2 Re{G}^2 - Gd^2 |G|^2 + Gd^2 - 2 Gd Re{G} + |G|^2))
        / (|G|^2 - 1)

    which inverts G = (CDR e^{j theta} + Gd) / (CDR + 1) for every theta.
    A negative radicand is clamped to 0 and the result is clipped to
    [0, cdr_max]. Cells with |G| = 1 return ``cdr_max``.

    Args:
        gamma: Complex coherence, |gamma| <= 1
        gamma_diff: Diffuse-field coherence in [0, 1], broadcastable to gamma
        cdr_max: Upper bound of the estimate

    Returns:
        CDR estimate with the broadcast shape (a float for scalar input)
    """
    g = np.asarray(gamma, dtype=complex)
    gd = np.asarray(gamma_diff, dtype=float)
    re = g.real
    mag2 = np.abs(g) ** 2

    radicand = gd ** 2 * re ** 2 - gd ** 2 * mag2 + gd ** 2 - 2.0 * gd * re + mag2
    numerator = gd * re - mag2 - np.sqrt(np.maximum(radicand, 0.0))
    denominator = mag2 - 1.0
    singular = denominator > -SINGULAR_TOLERANCE

    with np.errstate(divide="ignore", invalid="ignore"):
        cdr = np.where(singular, cdr_max, numerator / np.where(singular, -1.0, denominator))
    cdr = np.clip(np.nan_to_num(cdr, nan=cdr_max, posinf=cdr_max, neginf=0.0), 0.0, cdr_max)
    return float(cdr) if cdr.ndim == 0 else cdr


def diffuseness(cdr: ArrayLike) -> ArrayLike:
    """D = 1 / (1 + CDR), in (0, 1] for CDR >= 0."""
    values = np.asarray(cdr, dtype=float)
    if np.any(values < 0.0):
        raise ValidationError("CDR must be non-negative")
    result = 1.0 / (1.0 + values)
    return float(result) if result.ndim == 0 else result


def clamp_gamma_diff(values: np.ndarray, mode: str = GAMMA_DIFF_MODE) -> np.ndarray:
    """Map the signed sinc into [0, 1]: ``clip`` zeroes negative lobes, ``abs`` folds them."""
    if mode == "clip":
        return np.clip(values, 0.0, 1.0)
    if mode == "abs":
        return np.clip(np.abs(values), 0.0, 1.0)
    raise ValidationError(f"Unknown gamma_diff mode {mode}; choose from {', '.join(GAMMA_DIFF_MODES)}")


@dataclass
class DiffusenessDistribution:
    """Pair-pooled diffuseness of one frame.

    Attributes:
        mean: Average of the per-pair mel vectors
        variance: Scaled unbiased variance across pairs
        per_pair: M x n_filters per-pair vectors
    """

    mean: np.ndarray
    variance: np.ndarray
    per_pair: np.ndarray


def _pooled_moments(per_pair: np.ndarray, scale: float):
    if per_pair.shape[0] < 2:
        raise ValidationError(f"Pooling needs at least 2 microphone pairs, got {per_pair.shape[0]}")
    if scale < 0:
        raise ValidationError(f"Variance scale must be non-negative, got {scale}")
    mean = per_pair.mean(axis=0)
    variance = scale * per_pair.var(axis=0, ddof=1)
    return mean, variance


def pool_pairs(per_pair: np.ndarray, scale: float = VARIANCE_SCALE) -> DiffusenessDistribution:
    """Mean and scaled variance of per-pair diffuseness vectors.

    Args:
        per_pair: M x n_filters array
        scale: Factor applied to the unbiased (M - 1) variance

    Raises:
        ValidationError: If M < 2
    """
    per_pair = np.asarray(per_pair, dtype=float)
    mean, variance = _pooled_moments(per_pair, scale)
    return DiffusenessDistribution(mean, variance, per_pair)


@dataclass
class DiffusenessTrack:
    """Diffuseness statistics of a whole utterance.

    Attributes:
        mean: T x n_filters
        variance: T x n_filters
        per_pair: M x T x n_filters
    """

    mean: np.ndarray
    variance: np.ndarray
    per_pair: np.ndarray

    @property
    def num_frames(self) -> int:
        return self.mean.shape[0]

    def frame(self, n: int) -> DiffusenessDistribution:
        return DiffusenessDistribution(self.mean[n], self.variance[n], self.per_pair[:, n, :])


def extract_diffuseness(spectrograms: Sequence[Spectrogram],
                        geometry: ArrayGeometry,
                        forgetting_factor: float = FORGETTING_FACTOR,
                        filterbank: Optional[MelFilterbank] = None,
                        cdr_max: float = CDR_MAX,
                        gamma_diff_mode: str = GAMMA_DIFF_MODE,
                        variance_scale: float = VARIANCE_SCALE) -> DiffusenessTrack:
    """Coherence -> CDR -> diffuseness -> mel projection -> pair pooling.

    Args:
        spectrograms: One spectrogram per microphone
        geometry: The array the spectrograms come from
        forgetting_factor: Recursive averaging constant of the coherence
        filterbank: Mel filterbank; built from the STFT config when omitted
        cdr_max: Upper bound of the CDR estimate
        gamma_diff_mode: Handling of negative sinc lobes
        variance_scale: Scale of the across-pair variance

    Returns:
        The utterance diffuseness track
    """
    config = spectrograms[0].config
    if filterbank is None:
        filterbank = build_mel_filterbank(config.sample_rate, config.dft_length)
    if filterbank.num_bands != config.num_bands:
        raise DimensionError(f"Filterbank covers {filterbank.num_bands} bands, STFT has {config.num_bands}")

    pair_gamma = array_coherence(spectrograms, geometry, forgetting_factor)
    per_pair = np.empty((geometry.num_pairs, pair_gamma.shape[1], filterbank.num_filters))
    for m in range(geometry.num_pairs):
        diffuse = clamp_gamma_diff(gamma_diff(geometry, m, config), gamma_diff_mode)
        cdr = cdr_from_coherence(pair_gamma[m], diffuse[np.newaxis, :], cdr_max)
        per_pair[m] = project_pair(diffuseness(cdr), filterbank)

    mean, variance = _pooled_moments(per_pair, variance_scale)
    logger.info(f"Diffuseness: {geometry.num_pairs} pairs, {per_pair.shape[1]} frames, mean {mean.mean():.3f}")
    return DiffusenessTrack(mean, variance, per_pair)
