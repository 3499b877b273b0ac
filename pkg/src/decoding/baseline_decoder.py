# Baseline decoder: one forward pass on the observed features

import numpy as np

from ..config.config import CONTEXT_FRAMES
from ..features.pipeline import splice
from ..utils.exceptions import DimensionError
from .base_decoder import BaseDecoder
from .mlp import MlpModel, PosteriorVector, forward
from .sampler import FeatureDistribution


def decode_frame_baseline(model: MlpModel, frame: np.ndarray) -> PosteriorVector:
    """Posterior of the observed (mean) spliced frame."""
    return forward(model, frame)


class BaselineDecoder(BaseDecoder):
    """Decoder that ignores the feature uncertainty."""

    def __init__(self, model: MlpModel, context: int = CONTEXT_FRAMES):
        super().__init__("baseline", model, context)

    def combine(self, posteriors: np.ndarray) -> np.ndarray:
        return posteriors[0]

    def decode_frame(self, dist: FeatureDistribution, num_samples: int = 1, seed: int = 0,
                     frame_index: int = 0, clip: str = "none") -> PosteriorVector:
        return decode_frame_baseline(self.model, dist.mean)

    def decode_utterance(self, frames: np.ndarray, variances: np.ndarray, num_samples: int = 1,
                         seed: int = 0, clip: str = "none") -> np.ndarray:
        if frames.shape[1] * (2 * self.context + 1) != self.model.input_size:
            raise DimensionError(
                f"Spliced features have width {frames.shape[1] * (2 * self.context + 1)}, "
                f"model expects {self.model.input_size}"
            )
        return self.model.predict(splice(frames, self.context))
