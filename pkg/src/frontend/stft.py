# Short-time Fourier transform front-end

import logging
from dataclasses import dataclass
from typing import List

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.signal import get_window

from ..acoustics.scene import MultichannelSignal
from ..config.config import DEFAULT_SAMPLE_RATE, DFT_LENGTH, HOP_LENGTH, WINDOW
from ..utils.exceptions import ValidationError

logger = logging.getLogger("frontend.stft")

WINDOWS = ("sqrt-hann", "hann", "hamming", "rect")


class StftConfig(BaseModel):
    """Framing parameters shared by every spectral stage."""

    model_config = ConfigDict(frozen=True)

    dft_length: int = Field(DFT_LENGTH, ge=4)
    hop: int = Field(HOP_LENGTH, gt=0)
    window: str = WINDOW
    sample_rate: int = Field(DEFAULT_SAMPLE_RATE, gt=0)

    @model_validator(mode="after")
    def _check_framing(self):
        if self.dft_length % 2:
            raise ValueError(f"dft_length must be even, got {self.dft_length}")
        if self.hop > self.dft_length:
            raise ValueError(f"hop ({self.hop}) must not exceed dft_length ({self.dft_length})")
        if self.window not in WINDOWS:
            raise ValueError(f"Unknown window {self.window}; choose from {', '.join(WINDOWS)}")
        return self

    @property
    def num_bands(self) -> int:
        return self.dft_length // 2 + 1

    def band_frequencies(self) -> np.ndarray:
        """Center frequency of every one-sided band in Hz."""
        return np.arange(self.num_bands) * self.sample_rate / self.dft_length

    def num_frames(self, num_samples: int) -> int:
        return (num_samples - self.dft_length) // self.hop + 1


@dataclass
class Spectrogram:
    """T x K complex STFT of one channel."""

    frames: np.ndarray
    config: StftConfig

    def __post_init__(self):
        if self.frames.ndim != 2 or self.frames.shape[1] != self.config.num_bands:
            raise ValidationError(
                f"Spectrogram must be T x {self.config.num_bands}, got {self.frames.shape}"
            )

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    def power(self) -> np.ndarray:
        return np.abs(self.frames) ** 2


def analysis_window(config: StftConfig) -> np.ndarray:
    """Periodic analysis window of length ``dft_length``."""
    if config.window == "sqrt-hann":
        return np.sqrt(get_window("hann", config.dft_length, fftbins=True))
    if config.window == "rect":
        return get_window("boxcar", config.dft_length)
    return get_window(config.window, config.dft_length, fftbins=True)


def stft_channel(samples: np.ndarray, config: StftConfig) -> Spectrogram:
    """STFT of a single 1-D signal.

    Frames start at multiples of ``hop``; trailing samples that do not fill
    a frame are dropped. Each windowed frame is circularly shifted so its
    center sits at time zero before the DFT.

    Raises:
        ValidationError: If the signal is shorter than one frame
    """
    x = np.asarray(samples, dtype=float)
    if x.shape[0] < config.dft_length:
        raise ValidationError(f"Signal of {x.shape[0]} samples is shorter than one frame ({config.dft_length})")
    frames = sliding_window_view(x, config.dft_length)[::config.hop]
    windowed = np.fft.ifftshift(frames * analysis_window(config), axes=-1)
    return Spectrogram(np.fft.rfft(windowed, axis=-1), config)


def stft(signal: MultichannelSignal, config: StftConfig) -> List[Spectrogram]:
    """STFT of every channel of a multichannel signal.

    Raises:
        ValidationError: If the signal is shorter than one frame or its rate
            differs from ``config.sample_rate``
    """
    if signal.sample_rate != config.sample_rate:
        raise ValidationError(
            f"Signal rate {signal.sample_rate} Hz differs from STFT config rate {config.sample_rate} Hz"
        )
    spectrograms = [stft_channel(channel, config) for channel in signal.samples]
    logger.debug(f"STFT: {signal.num_channels} channels x {spectrograms[0].num_frames} frames")
    return spectrograms
