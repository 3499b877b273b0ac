# Margin-weighted averaging of sample posteriors

from dataclasses import dataclass

import numpy as np

from ..config.config import CONTEXT_FRAMES, WEIGHT_EPSILON
from ..utils.exceptions import ValidationError
from .base_decoder import BaseDecoder
from .mlp import MlpModel, PosteriorVector
from .sampler import SampleSet


@dataclass
class SampleWeights:
    """Margins and normalized weights of the L samples of a frame."""

    e: np.ndarray
    omega: np.ndarray


def sample_margins(posteriors: np.ndarray) -> np.ndarray:
    """Top posterior minus the best competitor, along the last axis."""
    if posteriors.shape[-1] < 2:
        raise ValidationError("Margins need at least two classes")
    top_two = np.sort(posteriors, axis=-1)[..., -2:]
    return top_two[..., 1] - top_two[..., 0]


def margin_weights(margins: np.ndarray) -> np.ndarray:
    """Normalize margins over axis 0; columns with total below 1e-15 get uniform weights."""
    total = margins.sum(axis=0)
    degenerate = total < WEIGHT_EPSILON
    uniform = np.full_like(margins, 1.0 / margins.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(degenerate, uniform, margins / np.where(degenerate, 1.0, total))


def mce_weights(posteriors: np.ndarray) -> SampleWeights:
    """Misclassification-measure weights of one frame's samples.

    Args:
        posteriors: L x J sample posteriors

    Returns:
        Margins e (top minus runner-up) and weights omega = e / sum(e),
        uniform when every margin is zero

    Raises:
        ValidationError: If L < 1 or J < 2
    """
    posteriors = np.asarray(posteriors, dtype=np.float64)
    if posteriors.ndim != 2 or posteriors.shape[0] < 1:
        raise ValidationError(f"Expected L x J posteriors with L >= 1, got {posteriors.shape}")
    e = sample_margins(posteriors)
    return SampleWeights(e, margin_weights(e))


def weighted_average(posteriors: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Convex combination of sample posteriors over axis 0."""
    return np.sum(omega[..., np.newaxis] * posteriors, axis=0)


def decode_frame_weighted(model: MlpModel, samples: SampleSet) -> PosteriorVector:
    """Margin-weighted average of the posteriors of the L samples of a frame."""
    return WeightedDecoder(model).decode_samples(samples)


class WeightedDecoder(BaseDecoder):
    """Averaging that trusts samples the classifier separates confidently."""

    def __init__(self, model: MlpModel, context: int = CONTEXT_FRAMES):
        super().__init__("weighted", model, context)

    def combine(self, posteriors: np.ndarray) -> np.ndarray:
        return weighted_average(posteriors, margin_weights(sample_margins(posteriors)))
