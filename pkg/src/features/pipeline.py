# Feature pipeline producing spliced logmelspec + delta + diffuseness observations

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import librosa
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..acoustics.geometry import ArrayGeometry
from ..acoustics.scene import MultichannelSignal
from ..config.config import (
    CDR_MAX,
    CONTEXT_FRAMES,
    DELTA_WINDOW,
    FORGETTING_FACTOR,
    GAMMA_DIFF_MODE,
    LOG_FLOOR_ABSOLUTE,
    LOG_FLOOR_RELATIVE,
    N_MEL_FILTERS,
    VARIANCE_SCALE,
)
from ..frontend.stft import Spectrogram, StftConfig, stft, stft_channel
from ..utils.exceptions import DimensionError, ValidationError
from ..utils.validators import validate_same_length
from .beamformer import beamform_das
from .diffuseness import DiffusenessDistribution, DiffusenessTrack, extract_diffuseness
from .melbank import MelFilterbank, build_mel_filterbank

logger = logging.getLogger("features.pipeline")


def logmelspec(spec: Spectrogram, fb: MelFilterbank) -> np.ndarray:
    """Natural log of the mel-weighted power spectrum, T x n_filters.

    Values are floored at 1e-10 times the mean mel power of the utterance
    (never below 1e-20) before the logarithm.
    """
    mel_power = fb.apply(spec.power())
    floor = max(LOG_FLOOR_RELATIVE * float(np.mean(mel_power)), LOG_FLOOR_ABSOLUTE)
    return np.log(np.maximum(mel_power, floor))


@dataclass
class MvnStats:
    """Per-dimension statistics used by mean and variance normalization."""

    mean: np.ndarray
    std: np.ndarray


def mvn(frames: np.ndarray) -> Tuple[np.ndarray, MvnStats]:
    """Normalize every dimension to zero mean and unit variance over the utterance.

    Dimensions that are constant up to round-off are mapped to 0.

    Raises:
        ValidationError: If fewer than 2 frames are given
    """
    frames = np.asarray(frames, dtype=float)
    if frames.shape[0] < 2:
        raise ValidationError(f"MVN needs at least 2 frames, got {frames.shape[0]}")
    mean = frames.mean(axis=0)
    std = frames.std(axis=0)
    constant = std <= 1e-10 * np.maximum(1.0, np.abs(mean))
    safe_std = np.where(constant, 1.0, std)
    normalized = np.where(constant, 0.0, (frames - mean) / safe_std)
    return normalized, MvnStats(mean, std)


def deltas(frames: np.ndarray, window: int = DELTA_WINDOW) -> np.ndarray:
    """Regression deltas over +-``window`` frames with replicated edges."""
    frames = np.asarray(frames, dtype=float)
    return librosa.feature.delta(frames, width=2 * window + 1, order=1, axis=0, mode="nearest")


def assemble(logmel: np.ndarray, delta: np.ndarray, diff_mean: np.ndarray) -> np.ndarray:
    """Concatenate the three feature streams frame by frame.

    Raises:
        DimensionError: If the streams have different frame counts
    """
    validate_same_length("assemble", logmel, delta, diff_mean)
    return np.concatenate([logmel, delta, diff_mean], axis=1)


def splice(frames: np.ndarray, context: int = CONTEXT_FRAMES) -> np.ndarray:
    """Stack each frame with its +-``context`` neighbours, replicating utterance edges.

    Returns:
        T x (2 * context + 1) * D array, row t = concat(frames[t - context .. t + context])
    """
    frames = np.asarray(frames)
    if context < 0:
        raise ValidationError(f"Context must be non-negative, got {context}")
    padded = np.pad(frames, ((context, context), (0, 0)), mode="edge")
    windows = sliding_window_view(padded, 2 * context + 1, axis=0)  # T x D x (2c+1)
    return np.ascontiguousarray(windows.transpose(0, 2, 1)).reshape(frames.shape[0], -1)


@dataclass
class FeatureFrame:
    """One assembled observation with the diffuseness distribution behind it."""

    logmelspec: np.ndarray
    delta: np.ndarray
    diffuseness: DiffusenessDistribution

    @property
    def assembled(self) -> np.ndarray:
        return np.concatenate([self.logmelspec, self.delta, self.diffuseness.mean])


@dataclass
class UtteranceFeatures:
    """Per-utterance features.

    Attributes:
        frames: T x 3n assembled vectors
        variances: T x n scaled diffuseness variances
        mvn_stats: Statistics used to normalize the logmelspec stream
        spliced: T x 3n(2c+1) classifier input
        track: Full diffuseness track including per-pair values
    """

    frames: np.ndarray
    variances: np.ndarray
    mvn_stats: Optional[MvnStats] = None
    context: int = CONTEXT_FRAMES
    track: Optional[DiffusenessTrack] = None
    spliced: np.ndarray = field(init=False)

    def __post_init__(self):
        validate_same_length("UtteranceFeatures", self.frames, self.variances)
        if self.frames.shape[1] != 3 * self.variances.shape[1]:
            raise DimensionError(
                f"Frames of width {self.frames.shape[1]} do not match variances of width {self.variances.shape[1]}"
            )
        self.spliced = splice(self.frames, self.context)

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def num_filters(self) -> int:
        return self.variances.shape[1]

    def full_variances(self) -> np.ndarray:
        """T x 3n variances, zero on the logmelspec and delta dimensions."""
        full = np.zeros_like(self.frames)
        full[:, 2 * self.num_filters:] = self.variances
        return full

    def frame(self, n: int) -> FeatureFrame:
        if self.track is None:
            raise ValidationError("Per-frame distributions need the diffuseness track")
        k = self.num_filters
        return FeatureFrame(self.frames[n, :k], self.frames[n, k:2 * k], self.track.frame(n))


class FeaturePipeline:
    """Multichannel signal to spliced logmelspec + delta + diffuseness features."""

    def __init__(self,
                 geometry: ArrayGeometry,
                 stft_config: Optional[StftConfig] = None,
                 forgetting_factor: float = FORGETTING_FACTOR,
                 variance_scale: float = VARIANCE_SCALE,
                 cdr_max: float = CDR_MAX,
                 n_filters: int = N_MEL_FILTERS,
                 gamma_diff_mode: str = GAMMA_DIFF_MODE,
                 context: int = CONTEXT_FRAMES,
                 beamform: bool = True):
        """Initialize the pipeline.

        Args:
            geometry: Array the recordings come from
            stft_config: Framing parameters
            forgetting_factor: Recursive averaging constant of the coherence
            variance_scale: Scale applied to the across-pair variance
            cdr_max: Upper bound of the CDR estimate
            n_filters: Number of mel filters
            gamma_diff_mode: Handling of negative sinc lobes ("clip" or "abs")
            context: Splicing context on each side
            beamform: Use the delay-and-sum output for logmelspec; otherwise
                the first microphone
        """
        self.geometry = geometry
        self.stft_config = stft_config or StftConfig()
        self.forgetting_factor = forgetting_factor
        self.variance_scale = variance_scale
        self.cdr_max = cdr_max
        self.gamma_diff_mode = gamma_diff_mode
        self.context = context
        self.beamform = beamform
        self.filterbank = build_mel_filterbank(self.stft_config.sample_rate, self.stft_config.dft_length, n_filters)
        self.logger = logging.getLogger("features.pipeline")

    def process(self, signal: MultichannelSignal, doa: Tuple[float, float]) -> UtteranceFeatures:
        """Run the full chain on one utterance.

        Args:
            signal: Multichannel recording
            doa: Look direction of the beamformer (azimuth, elevation) in radians

        Returns:
            The utterance features

        Raises:
            DimensionError: If the channel count differs from the geometry
            ValidationError: If the utterance is shorter than two frames
        """
        if signal.num_channels != self.geometry.num_mics:
            raise DimensionError(
                f"Signal has {signal.num_channels} channels, geometry has {self.geometry.num_mics} microphones"
            )
        if signal.geometry is None:
            signal = MultichannelSignal(signal.samples, signal.sample_rate, self.geometry)

        spectrograms = stft(signal, self.stft_config)
        track = extract_diffuseness(
            spectrograms,
            self.geometry,
            forgetting_factor=self.forgetting_factor,
            filterbank=self.filterbank,
            cdr_max=self.cdr_max,
            gamma_diff_mode=self.gamma_diff_mode,
            variance_scale=self.variance_scale,
        )

        if self.beamform:
            mono = stft_channel(beamform_das(signal, doa).samples[0], self.stft_config)
        else:
            mono = spectrograms[0]

        normalized, stats = mvn(logmelspec(mono, self.filterbank))
        frames = assemble(normalized, deltas(normalized), track.mean)
        features = UtteranceFeatures(frames, track.variance, stats, self.context, track)
        self.logger.info(f"Extracted {features.num_frames} frames of width {frames.shape[1]}")
        return features
