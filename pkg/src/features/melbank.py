# Row-normalized mel filterbank

import logging
from dataclasses import dataclass

import librosa
import numpy as np

from ..config.config import N_MEL_FILTERS
from ..utils.exceptions import ValidationError

logger = logging.getLogger("features.melbank")


@dataclass(frozen=True)
class MelFilterbank:
    """n_filters x (dft_length/2 + 1) non-negative weights, every row summing to 1."""

    weights: np.ndarray
    sample_rate: int
    dft_length: int

    @property
    def num_filters(self) -> int:
        return self.weights.shape[0]

    @property
    def num_bands(self) -> int:
        return self.weights.shape[1]

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Project band values along the last axis onto the mel filters."""
        values = np.asarray(values)
        if values.shape[-1] != self.num_bands:
            raise ValidationError(f"Expected {self.num_bands} bands, got {values.shape[-1]}")
        return values @ self.weights.T


def build_mel_filterbank(sample_rate: int, dft_length: int, n_filters: int = N_MEL_FILTERS) -> MelFilterbank:
    """Triangular HTK-mel filters from 0 Hz to Nyquist, normalized to unit row sum.

    Args:
        sample_rate: Sampling rate in Hz
        dft_length: DFT length; the filterbank covers dft_length/2 + 1 bands
        n_filters: Number of mel filters

    Returns:
        The filterbank

    Raises:
        ValidationError: If n_filters >= dft_length/2 or any filter falls
            between two bins and receives no weight
    """
    if n_filters < 1 or n_filters >= dft_length / 2:
        raise ValidationError(f"n_filters must lie in [1, {dft_length // 2}), got {n_filters}")

    weights = librosa.filters.mel(
        sr=sample_rate,
        n_fft=dft_length,
        n_mels=n_filters,
        fmin=0.0,
        fmax=sample_rate / 2.0,
        htk=True,
        norm=None,
        dtype=np.float64,
    )
    row_sums = weights.sum(axis=1)
    empty = np.flatnonzero(row_sums <= 0.0)
    if empty.size:
        raise ValidationError(
            f"Mel filters {empty.tolist()} are narrower than one DFT bin "
            f"({n_filters} filters, dft_length {dft_length}, {sample_rate} Hz)"
        )

    weights = weights / row_sums[:, np.newaxis]
    weights.setflags(write=False)
    logger.debug(f"Built {n_filters}-filter mel bank over {weights.shape[1]} bands")
    return MelFilterbank(weights, sample_rate, dft_length)


def project_pair(d_vector: np.ndarray, fb: MelFilterbank) -> np.ndarray:
    """Mel-weight a per-band diffuseness vector (or a T x K stack of them)."""
    return fb.apply(d_vector)
