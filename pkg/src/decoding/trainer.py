# Mini-batch SGD trainer for desk-scale classifiers

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit, log_softmax, softmax

from ..config.config import BATCH_SIZE, DEFAULT_SEED, EPOCHS, HIDDEN_SIZES, LEARNING_RATE, MOMENTUM
from ..utils.exceptions import DimensionError, ValidationError
from ..utils.rng import philox_generator
from .mlp import Layer, MlpModel

logger = logging.getLogger("decoding.trainer")

Gradients = List[Tuple[np.ndarray, np.ndarray]]


class TrainConfig(BaseModel):
    """Hyperparameters of :func:`train_mlp`."""

    model_config = ConfigDict(frozen=True)

    hidden_sizes: Tuple[int, ...] = HIDDEN_SIZES
    epochs: int = Field(EPOCHS, ge=0)
    batch_size: int = Field(BATCH_SIZE, ge=1)
    learning_rate: float = Field(LEARNING_RATE, ge=0.0)
    momentum: float = Field(MOMENTUM, ge=0.0, lt=1.0)
    seed: int = DEFAULT_SEED


@dataclass
class LabeledDataset:
    """N input vectors with their integer class labels."""

    inputs: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.inputs.ndim != 2 or self.labels.ndim != 1:
            raise DimensionError(f"Expected N x D inputs and N labels, got {self.inputs.shape} and {self.labels.shape}")
        if self.inputs.shape[0] != self.labels.shape[0]:
            raise DimensionError(f"{self.inputs.shape[0]} inputs but {self.labels.shape[0]} labels")
        if self.labels.size and self.labels.min() < 0:
            raise ValidationError("Labels must be non-negative class indices")

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def num_classes(self) -> int:
        return int(self.labels.max()) + 1 if len(self) else 0


def init_mlp(layer_sizes: Sequence[int], seed: int = DEFAULT_SEED) -> MlpModel:
    """Glorot-uniform weights and zero biases; layer k draws from stream ("init", k)."""
    layers = []
    for k, (n_in, n_out) in enumerate(zip(layer_sizes[:-1], layer_sizes[1:])):
        limit = math.sqrt(6.0 / (n_in + n_out))
        weights = philox_generator(seed, "init", k).uniform(-limit, limit, size=(n_in, n_out))
        activation = "softmax" if k == len(layer_sizes) - 2 else "sigmoid"
        layers.append(Layer(weights, np.zeros(n_out), activation))
    return MlpModel(layers)


def loss_and_gradients(model: MlpModel, inputs: np.ndarray, labels: np.ndarray) -> Tuple[float, Gradients]:
    """Mean cross-entropy of a batch and its gradient for every layer.

    Returns:
        (loss, [(dW, db) per layer])
    """
    return _backprop([(layer.weights, layer.bias) for layer in model.layers], inputs, labels)


def _backprop(params: Gradients, inputs: np.ndarray, labels: np.ndarray) -> Tuple[float, Gradients]:
    activations = [np.asarray(inputs, dtype=np.float64)]
    for weights, bias in params[:-1]:
        activations.append(expit(activations[-1] @ weights + bias))
    logits = activations[-1] @ params[-1][0] + params[-1][1]

    n = logits.shape[0]
    rows = np.arange(n)
    loss = -float(np.mean(log_softmax(logits, axis=1)[rows, labels]))

    delta = softmax(logits, axis=1)
    delta[rows, labels] -= 1.0
    delta /= n

    gradients: Gradients = []
    for k in range(len(params) - 1, -1, -1):
        gradients.append((activations[k].T @ delta, delta.sum(axis=0)))
        if k > 0:
            a = activations[k]
            delta = (delta @ params[k][0].T) * a * (1.0 - a)
    gradients.reverse()
    return loss, gradients


def train_mlp(dataset: LabeledDataset, config: Optional[TrainConfig] = None,
              num_classes: Optional[int] = None) -> MlpModel:
    """Train a sigmoid/softmax MLP with momentum SGD on cross-entropy.

    The epoch-e shuffle comes from stream ("shuffle", e), so the result is a
    deterministic function of the dataset and the config.

    Args:
        dataset: Training inputs and labels
        config: Hyperparameters
        num_classes: Output size; one past the largest label when omitted

    Returns:
        The trained model

    Raises:
        ValidationError: If the dataset is empty or holds a single class
    """
    config = config or TrainConfig()
    if len(dataset) == 0:
        raise ValidationError("Cannot train on an empty dataset")
    if np.unique(dataset.labels).size < 2:
        raise ValidationError("Training needs at least two distinct classes")
    num_classes = num_classes or dataset.num_classes
    if num_classes < dataset.num_classes:
        raise ValidationError(f"Labels reach {dataset.num_classes - 1} but only {num_classes} classes requested")

    sizes = [dataset.inputs.shape[1], *config.hidden_sizes, num_classes]
    model = init_mlp(sizes, config.seed)
    params = [(layer.weights.copy(), layer.bias.copy()) for layer in model.layers]
    velocity = [(np.zeros_like(w), np.zeros_like(b)) for w, b in params]
    logger.info(f"Training {sizes} on {len(dataset)} examples for {config.epochs} epochs")

    for epoch in range(config.epochs):
        order = philox_generator(config.seed, "shuffle", epoch).permutation(len(dataset))
        epoch_loss = 0.0
        for start in range(0, len(dataset), config.batch_size):
            batch = order[start:start + config.batch_size]
            loss, grads = _backprop(params, dataset.inputs[batch], dataset.labels[batch])
            epoch_loss += loss * batch.size
            for (w, b), (v_w, v_b), (g_w, g_b) in zip(params, velocity, grads):
                v_w *= config.momentum
                v_w -= config.learning_rate * g_w
                v_b *= config.momentum
                v_b -= config.learning_rate * g_b
                w += v_w
                b += v_b
        logger.debug(f"Epoch {epoch + 1}/{config.epochs}: loss {epoch_loss / len(dataset):.5f}")

    trained = MlpModel([Layer(w, b, layer.activation) for (w, b), layer in zip(params, model.layers)])
    logger.info(f"Training finished, {len(trained.layers)} layers")
    return trained
