# Feed-forward classifier with sigmoid hidden layers and a softmax output

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy.special import expit, softmax

from ..utils.exceptions import DimensionError, ModelError, ValidationError
from ..utils.validators import validate_probability_rows

logger = logging.getLogger("decoding.mlp")

ACTIVATIONS = {"sigmoid": expit, "softmax": lambda z: softmax(z, axis=-1)}


@dataclass
class Layer:
    """Affine map followed by an activation; ``weights`` is in x out."""

    weights: np.ndarray
    bias: np.ndarray
    activation: str

    @property
    def input_size(self) -> int:
        return self.weights.shape[0]

    @property
    def output_size(self) -> int:
        return self.weights.shape[1]


class MlpModel:
    """Immutable multilayer perceptron mapping spliced features to class posteriors."""

    def __init__(self, layers: Sequence[Layer]):
        """Initialize the model.

        Args:
            layers: Layers from input to output; hidden layers use "sigmoid",
                the last layer "softmax"

        Raises:
            ModelError: If dimensions do not chain, parameters are not finite
                or the activations are misplaced
        """
        if not layers:
            raise ModelError("A model needs at least one layer")
        frozen: List[Layer] = []
        for k, layer in enumerate(layers):
            weights = np.array(layer.weights, dtype=np.float64)
            bias = np.array(layer.bias, dtype=np.float64)
            if weights.ndim != 2 or bias.shape != (weights.shape[1],):
                raise ModelError(f"Layer {k}: weights {weights.shape} and bias {bias.shape} do not match")
            if k > 0 and weights.shape[0] != frozen[-1].output_size:
                raise ModelError(f"Layer {k} expects {weights.shape[0]} inputs, previous layer emits {frozen[-1].output_size}")
            if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
                raise ModelError(f"Layer {k} has non-finite parameters")
            expected = "softmax" if k == len(layers) - 1 else "sigmoid"
            if layer.activation != expected:
                raise ModelError(f"Layer {k} must use {expected}, got {layer.activation}")
            weights.setflags(write=False)
            bias.setflags(write=False)
            frozen.append(Layer(weights, bias, layer.activation))
        self.layers = tuple(frozen)

    @property
    def input_size(self) -> int:
        return self.layers[0].input_size

    @property
    def num_classes(self) -> int:
        return self.layers[-1].output_size

    @property
    def layer_sizes(self) -> List[int]:
        return [self.input_size] + [layer.output_size for layer in self.layers]

    def predict(self, inputs: np.ndarray) -> np.ndarray:
        """Posteriors for a batch.

        Args:
            inputs: N x input_size (or a single input vector)

        Returns:
            N x J posteriors (J-vector for a single input)

        Raises:
            DimensionError: If the input width differs from the model input size
        """
        x = np.asarray(inputs, dtype=np.float64)
        if x.shape[-1] != self.input_size:
            raise DimensionError(f"Model expects inputs of width {self.input_size}, got {x.shape[-1]}")
        for layer in self.layers:
            x = ACTIVATIONS[layer.activation](x @ layer.weights + layer.bias)
        return x


@dataclass
class PosteriorVector:
    """Class posteriors of one frame."""

    p: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=np.float64)
        is_valid, issues = validate_probability_rows(self.p)
        if not is_valid:
            raise ValidationError(f"Invalid posterior: {', '.join(issues)}")

    @property
    def num_classes(self) -> int:
        return self.p.shape[0]

    def argmax(self) -> int:
        """Most probable class; ties resolve to the lowest index."""
        return int(np.argmax(self.p))


def forward(model: MlpModel, input_vector: np.ndarray) -> PosteriorVector:
    """Posterior of a single spliced input vector."""
    input_vector = np.asarray(input_vector)
    if input_vector.ndim != 1:
        raise DimensionError(f"forward takes one input vector, got shape {input_vector.shape}")
    return PosteriorVector(model.predict(input_vector))
