# Decoder Factory for creating decoder instances

import logging
from typing import Dict, Optional, Type

from ..config.config import CONTEXT_FRAMES
from ..utils.exceptions import ValidationError
from .arithmetic_decoder import ArithmeticDecoder
from .base_decoder import BaseDecoder
from .baseline_decoder import BaselineDecoder
from .mlp import MlpModel
from .weighted_decoder import WeightedDecoder

DECODE_MODES = ("baseline", "arithmetic", "weighted")


class DecoderFactory:
    """Factory class for creating and caching decoders of one model."""

    def __init__(self, model: MlpModel, context: int = CONTEXT_FRAMES):
        """Initialize the decoder factory.

        Args:
            model: Classifier shared by every decoder
            context: Splicing context on each side
        """
        self.logger = logging.getLogger("decoder_factory")
        self.model = model
        self.context = context
        self.decoders: Dict[str, BaseDecoder] = {}

        self.decoder_classes: Dict[str, Type[BaseDecoder]] = {
            "baseline": BaselineDecoder,
            "arithmetic": ArithmeticDecoder,
            "weighted": WeightedDecoder
        }

    def get_decoder(self, mode: str, context: Optional[int] = None) -> BaseDecoder:
        """Get a decoder for the given mode.

        Args:
            mode: "baseline", "arithmetic" or "weighted" (case-insensitive)
            context: Optional splicing context override

        Returns:
            A decoder instance

        Raises:
            ValidationError: If the mode is not recognized
        """
        mode = mode.lower()
        context = self.context if context is None else context

        cache_key = f"{mode}_{context}"
        if cache_key in self.decoders:
            self.logger.debug(f"Returning cached decoder: {mode}")
            return self.decoders[cache_key]

        if mode not in self.decoder_classes:
            raise ValidationError(f"Unknown decode mode: {mode}. Available modes: {', '.join(self.decoder_classes.keys())}")

        decoder = self.decoder_classes[mode](self.model, context)
        self.decoders[cache_key] = decoder
        self.logger.info(f"Created new decoder: {mode}, context: +-{context}")
        return decoder

    def clear_cache(self):
        """Clear the cache of decoder instances."""
        self.decoders.clear()
        self.logger.info("Cleared decoder cache")
