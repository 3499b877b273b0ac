# Monte Carlo convergence of sample-averaged posteriors

import logging
import math
from typing import Sequence

import numpy as np
import pandas as pd

from ..config.config import CONTEXT_FRAMES, N_MEL_FILTERS
from ..decoding.arithmetic_decoder import ArithmeticDecoder
from ..decoding.mlp import MlpModel
from ..decoding.sampler import FeatureDistribution, draw_samples
from ..utils.rng import derive_seed, philox_generator

logger = logging.getLogger("experiments.convergence")

DEFAULT_GRID = (1, 3, 10, 30, 100)


def spliced_distribution(num_filters: int = N_MEL_FILTERS, context: int = CONTEXT_FRAMES,
                         variance: float = 0.05, seed: int = 0) -> FeatureDistribution:
    """Random spliced frame with ``variance`` on the diffuseness dims of every context block."""
    rng = philox_generator(seed, "convergence", "frame")
    block = 3 * num_filters
    blocks = 2 * context + 1
    mean = np.empty(block * blocks)
    var = np.zeros(block * blocks)
    for b in range(blocks):
        offset = b * block
        mean[offset:offset + 2 * num_filters] = rng.standard_normal(2 * num_filters)
        mean[offset + 2 * num_filters:offset + block] = rng.uniform(0.2, 0.8, num_filters)
        var[offset + 2 * num_filters:offset + block] = variance
    return FeatureDistribution(mean, var)


def reference_posterior(model: MlpModel, dist: FeatureDistribution, num_samples: int = 10 ** 6,
                        chunk_size: int = 10 ** 4, seed: int = 0) -> np.ndarray:
    """High-L estimate of the expected posterior, streamed in chunks.

    Only dimensions with nonzero variance are sampled; chunk c draws from
    stream ("reference", c).
    """
    active = np.flatnonzero(dist.variance)
    scale = np.sqrt(dist.variance[active])
    total = np.zeros(model.num_classes)
    done = 0
    chunk = 0
    while done < num_samples:
        size = min(chunk_size, num_samples - done)
        z = np.tile(dist.mean, (size, 1))
        z[:, active] += scale * philox_generator(seed, "reference", chunk).standard_normal((size, active.size))
        total += model.predict(z).sum(axis=0)
        done += size
        chunk += 1
    return total / num_samples


def run_convergence_study(model: MlpModel, dist: FeatureDistribution, grid: Sequence[int] = DEFAULT_GRID,
                          reference_samples: int = 10 ** 6, chunk_size: int = 10 ** 4,
                          repetitions: int = 200, seed: int = 0) -> pd.DataFrame:
    """RMS deviation of arithmetic averaging from the high-L reference for every L in ``grid``.

    Repetition r at sample count L uses frame stream r under a seed derived
    from (seed, L).

    Returns:
        DataFrame with columns num_samples, rms
    """
    reference = reference_posterior(model, dist, reference_samples, chunk_size, seed)
    decoder = ArithmeticDecoder(model, context=0)
    rows = []
    for num_samples in grid:
        run_seed = derive_seed(seed, "convergence", num_samples)
        squared = [
            np.mean((decoder.decode_samples(draw_samples(dist, num_samples, run_seed, r)).p - reference) ** 2)
            for r in range(repetitions)
        ]
        rms = math.sqrt(float(np.mean(squared)))
        rows.append({"num_samples": int(num_samples), "rms": rms})
        logger.info(f"L={num_samples}: RMS deviation {rms:.3e}")
    return pd.DataFrame(rows, columns=["num_samples", "rms"])
