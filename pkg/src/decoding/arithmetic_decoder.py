# Arithmetic averaging of sample posteriors

import numpy as np

from ..config.config import CONTEXT_FRAMES
from .base_decoder import BaseDecoder
from .mlp import MlpModel, PosteriorVector
from .sampler import SampleSet


def decode_frame_arithmetic(model: MlpModel, samples: SampleSet) -> PosteriorVector:
    """Mean of the posteriors of the L samples of a frame."""
    return ArithmeticDecoder(model).decode_samples(samples)


class ArithmeticDecoder(BaseDecoder):
    """Monte Carlo estimate of the expected posterior under the feature distribution."""

    def __init__(self, model: MlpModel, context: int = CONTEXT_FRAMES):
        super().__init__("arithmetic", model, context)

    def combine(self, posteriors: np.ndarray) -> np.ndarray:
        return posteriors.mean(axis=0)
