# Ring-shaped synthetic frame classification task for comparing decode modes

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from ..decoding.decoder_factory import DECODE_MODES, DecoderFactory
from ..decoding.evaluation import LabeledUtterance, evaluate_frame_accuracy
from ..decoding.mlp import MlpModel
from ..decoding.trainer import LabeledDataset, TrainConfig, train_mlp
from ..utils.rng import philox_generator

logger = logging.getLogger("experiments.synthetic_task")


@dataclass(frozen=True)
class RingTask:
    """Classes laid out as arcs of an annulus.

    Wide and narrow arcs alternate around the ring with empty gaps between
    them. Class 2k is the k-th wide arc, class 2k + 1 the narrow arc that
    follows it. Lengths are measured along the ring; coordinates are scaled
    by the ring radius so the ring has unit radius.
    """

    wide_arc: float = 3.0
    narrow_arc: float = 0.6
    gap: float = 0.8
    num_pairs: int = 5
    radial_jitter: float = 1.0
    noise_std: float = 1.2

    @property
    def period(self) -> float:
        return self.wide_arc + self.narrow_arc + 2.0 * self.gap

    @property
    def circumference(self) -> float:
        return self.num_pairs * self.period

    @property
    def radius(self) -> float:
        return self.circumference / (2.0 * math.pi)

    @property
    def num_classes(self) -> int:
        return 2 * self.num_pairs

    @property
    def noise_variance(self) -> float:
        """Per-coordinate variance of the test perturbation in scaled units."""
        return (self.noise_std / self.radius) ** 2

    def arcs(self) -> Tuple[np.ndarray, np.ndarray]:
        """Start position and length of every class arc, indexed by label."""
        k = np.arange(self.num_pairs)
        starts = np.empty(self.num_classes)
        lengths = np.empty(self.num_classes)
        starts[0::2] = k * self.period
        starts[1::2] = k * self.period + self.wide_arc + self.gap
        lengths[0::2] = self.wide_arc
        lengths[1::2] = self.narrow_arc
        return starts, lengths

    def sample(self, count: int, seed: int, *stream) -> Tuple[np.ndarray, np.ndarray]:
        """Draw clean points with equiprobable labels.

        Returns:
            (count x 2 points, count labels)
        """
        rng = philox_generator(seed, "synthetic", *stream)
        labels = rng.integers(0, self.num_classes, size=count)
        starts, lengths = self.arcs()
        position = starts[labels] + rng.uniform(0.0, 1.0, size=count) * lengths[labels]
        angle = 2.0 * math.pi * position / self.circumference
        radius = self.radius + rng.uniform(-self.radial_jitter, self.radial_jitter, size=count)
        points = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1) / self.radius
        return points, labels

    def training_set(self, count: int, seed: int) -> LabeledDataset:
        points, labels = self.sample(count, seed, "train")
        return LabeledDataset(points, labels)

    def test_utterance(self, count: int, seed: int) -> LabeledUtterance:
        """Noisy test observations with the perturbation variance as their uncertainty."""
        points, labels = self.sample(count, seed, "test")
        noise = philox_generator(seed, "synthetic", "test-noise").standard_normal(points.shape)
        observed = points + math.sqrt(self.noise_variance) * noise
        variances = np.full_like(observed, self.noise_variance)
        return LabeledUtterance(observed, variances, labels, name=f"ring-{seed}")


def default_train_config(seed: int = 0) -> TrainConfig:
    return TrainConfig(hidden_sizes=(64, 64), epochs=80, batch_size=32, learning_rate=0.1, momentum=0.9, seed=seed)


def train_ring_model(task: RingTask, count: int = 12000, config: Optional[TrainConfig] = None,
                     seed: int = 0) -> MlpModel:
    """Train a classifier on clean ring points."""
    config = config or default_train_config(seed)
    return train_mlp(task.training_set(count, seed), config, num_classes=task.num_classes)


@dataclass
class OrderingResult:
    """Per-seed accuracies of the three decode modes and the significance of the gain."""

    accuracies: pd.DataFrame
    t_statistic: float
    p_value: float

    def mean_accuracy(self) -> Dict[str, float]:
        return {mode: float(self.accuracies[mode].mean()) for mode in DECODE_MODES}


def run_ordering_experiment(model: MlpModel, task: RingTask, seeds: Sequence[int] = tuple(range(10)),
                            frames_per_seed: int = 4000, num_samples: int = 30) -> OrderingResult:
    """Compare baseline, arithmetic and weighted decoding over independent test sets.

    The p-value is that of a one-sided paired t-test of weighted against
    baseline accuracy across seeds.
    """
    factory = DecoderFactory(model, context=0)
    rows = []
    for seed in seeds:
        utterance = task.test_utterance(frames_per_seed, seed)
        row = {"seed": seed}
        for mode in DECODE_MODES:
            report = evaluate_frame_accuracy(model, [utterance], mode, num_samples, seed, context=0, factory=factory)
            row[mode] = report.accuracy
        rows.append(row)
        logger.info(f"Seed {seed}: " + ", ".join(f"{m} {row[m]:.4f}" for m in DECODE_MODES))

    accuracies = pd.DataFrame(rows, columns=["seed", *DECODE_MODES])
    test = stats.ttest_rel(accuracies["weighted"], accuracies["baseline"], alternative="greater")
    result = OrderingResult(accuracies, float(test.statistic), float(test.pvalue))
    logger.info(f"Mean accuracy {result.mean_accuracy()}, weighted > baseline p = {result.p_value:.3g}")
    return result
