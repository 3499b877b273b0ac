# Base Decoder class for frame posterior decoding

import logging
from abc import ABC, abstractmethod

import numpy as np

from ..config.config import CONTEXT_FRAMES
from ..features.pipeline import splice
from ..utils.exceptions import DimensionError
from ..utils.validators import validate_width
from .mlp import MlpModel, PosteriorVector
from .sampler import FeatureDistribution, SampleSet, draw_samples, draw_utterance_samples


def _all_equal(samples: np.ndarray) -> bool:
    return bool(np.all(samples == samples[:1]))


class BaseDecoder(ABC):
    """Base class for all posterior decoders.

    A decoder turns feature samples into class posteriors. Subclasses
    define how the posteriors of the L samples of a frame are combined.
    """

    def __init__(self, name: str, model: MlpModel, context: int = CONTEXT_FRAMES):
        """Initialize the base decoder.

        Args:
            name: The name of the decoding mode
            model: Classifier whose input is the spliced feature vector
            context: Splicing context on each side
        """
        self.name = name
        self.model = model
        self.context = context
        self.logger = logging.getLogger(f"decoder.{name}")

    @abstractmethod
    def combine(self, posteriors: np.ndarray) -> np.ndarray:
        """Reduce posteriors over the sample axis.

        This method must be implemented by all subclasses.

        Args:
            posteriors: L x ... x J sample posteriors

        Returns:
            The combined posteriors without the leading sample axis
        """
        pass

    def decode_samples(self, samples: SampleSet) -> PosteriorVector:
        """Combine the posteriors of one frame's samples.

        Identical samples need a single forward pass; the result then equals
        the posterior of that sample exactly.
        """
        if _all_equal(samples.samples):
            return PosteriorVector(self.model.predict(samples.samples[0]))
        return PosteriorVector(self.combine(self.model.predict(samples.samples)))

    def decode_frame(self, dist: FeatureDistribution, num_samples: int, seed: int,
                     frame_index: int = 0, clip: str = "none") -> PosteriorVector:
        """Decode one spliced frame distribution."""
        return self.decode_samples(draw_samples(dist, num_samples, seed, frame_index, clip))

    def decode_utterance(self, frames: np.ndarray, variances: np.ndarray, num_samples: int,
                         seed: int, clip: str = "none") -> np.ndarray:
        """Decode every frame of an utterance.

        Frame n is sampled L times; sample sequence l is spliced on its own
        so each context block of a spliced sample carries that block's draw.

        Args:
            frames: T x D assembled features
            variances: T x D variances
            num_samples: L
            seed: Run seed
            clip: Sample clipping mode

        Returns:
            T x J posteriors

        Raises:
            DimensionError: If the variances do not match the frames or the
                spliced width does not fit the model
        """
        validate_width(variances, frames.shape[1], "variances")
        spliced_width = frames.shape[1] * (2 * self.context + 1)
        if spliced_width != self.model.input_size:
            raise DimensionError(
                f"Spliced features have width {spliced_width}, model expects {self.model.input_size}"
            )
        if not np.any(variances):
            return self.model.predict(splice(frames, self.context))

        samples = draw_utterance_samples(frames, variances, num_samples, seed, clip)
        posteriors = np.stack([self.model.predict(splice(sample, self.context)) for sample in samples])
        self.logger.debug(f"Decoded {frames.shape[0]} frames with {num_samples} samples each")
        return self.combine(posteriors)
