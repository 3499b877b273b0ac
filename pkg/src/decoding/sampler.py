# Gaussian distortion model and reproducible feature sampling

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..config.config import CDR_MAX
from ..utils.exceptions import DimensionError, ValidationError
from ..utils.rng import philox_generator
from ..utils.validators import validate_count

logger = logging.getLogger("decoding.sampler")

CLIP_MODES = ("none", "range")


@dataclass
class FeatureDistribution:
    """Diagonal Gaussian around an observed feature vector.

    For the assembled features only the trailing diffuseness third of the
    variance vector is nonzero; other layouts are accepted as given.
    """

    mean: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.variance = np.asarray(self.variance, dtype=float)
        if self.mean.shape != self.variance.shape or self.mean.ndim != 1:
            raise DimensionError(f"Mean {self.mean.shape} and variance {self.variance.shape} must be equal-length vectors")
        if np.any(self.variance < 0.0) or not np.all(np.isfinite(self.variance)):
            raise ValidationError("Variances must be finite and non-negative")

    @classmethod
    def from_frame(cls, assembled: np.ndarray, diffuseness_variance: np.ndarray) -> "FeatureDistribution":
        """Distribution of an assembled frame whose trailing dims carry the diffuseness variance."""
        variance = np.zeros(np.shape(assembled)[0])
        variance[-len(diffuseness_variance):] = diffuseness_variance
        return cls(assembled, variance)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def is_deterministic(self) -> bool:
        return not np.any(self.variance)


@dataclass
class SampleSet:
    """L feature samples drawn for one frame."""

    samples: np.ndarray
    seed: int
    frame_index: int

    def __post_init__(self):
        if self.samples.ndim != 2 or self.samples.shape[0] < 1:
            raise ValidationError(f"A sample set must be L x D with L >= 1, got {self.samples.shape}")

    @property
    def num_samples(self) -> int:
        return self.samples.shape[0]


def clip_policy(samples: np.ndarray, mode: str = "none", num_diffuseness: Optional[int] = None,
                cdr_max: float = CDR_MAX) -> np.ndarray:
    """Optionally keep sampled diffuseness values inside their attainable range.

    Args:
        samples: Array whose last axis holds assembled features
        mode: "none" passes samples through; "range" clamps the trailing
            ``num_diffuseness`` dims to [1 / (1 + cdr_max), 1)
        num_diffuseness: Number of trailing diffuseness dims (a third of the
            width when omitted)
        cdr_max: Upper bound of the CDR estimate

    Returns:
        The (possibly clamped) samples
    """
    if mode == "none":
        return samples
    if mode != "range":
        raise ValidationError(f"Unknown clip mode {mode}; choose from {', '.join(CLIP_MODES)}")
    k = samples.shape[-1] // 3 if num_diffuseness is None else num_diffuseness
    clipped = np.array(samples, dtype=float, copy=True)
    clipped[..., -k:] = np.clip(clipped[..., -k:], 1.0 / (1.0 + cdr_max), np.nextafter(1.0, 0.0))
    return clipped


def draw_samples(dist: FeatureDistribution, num_samples: int, seed: int, frame_index: int = 0,
                 clip: str = "none") -> SampleSet:
    """Draw L samples z = mean + sqrt(variance) * g with g ~ N(0, I).

    The normals come from the stream ``("distortion", frame_index)`` as an
    L x D block in row-major order, so a frame's samples do not depend on
    which other frames were sampled before it.

    Raises:
        ValidationError: If L < 1
    """
    num_samples = validate_count(num_samples, 1, "Number of samples")
    normals = philox_generator(seed, "distortion", frame_index).standard_normal((num_samples, dist.dim))
    samples = dist.mean + np.sqrt(dist.variance) * normals
    return SampleSet(clip_policy(samples, clip), seed, frame_index)


def draw_utterance_samples(frames: np.ndarray, variances: np.ndarray, num_samples: int, seed: int,
                           clip: str = "none") -> np.ndarray:
    """Sample every frame of an utterance.

    Args:
        frames: T x D means
        variances: T x D variances

    Returns:
        L x T x D array; [l, n] is sample l of frame n
    """
    if frames.shape != variances.shape:
        raise DimensionError(f"Frames {frames.shape} and variances {variances.shape} differ in shape")
    num_samples = validate_count(num_samples, 1, "Number of samples")
    out = np.empty((num_samples,) + frames.shape)
    for n in range(frames.shape[0]):
        out[:, n, :] = draw_samples(FeatureDistribution(frames[n], variances[n]), num_samples, seed, n, clip).samples
    logger.debug(f"Drew {num_samples} samples for {frames.shape[0]} frames")
    return out
