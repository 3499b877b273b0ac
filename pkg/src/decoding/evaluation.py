# Frame accuracy evaluation, reports and sample-count sweeps

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import simplejson

from ..config.config import CONTEXT_FRAMES
from ..features.pipeline import UtteranceFeatures
from ..utils.exceptions import DimensionError, ValidationError
from ..utils.fileio import atomic_write, atomic_write_text
from ..utils.rng import derive_seed
from .decoder_factory import DECODE_MODES, DecoderFactory
from .mlp import MlpModel
from .weighted_decoder import sample_margins

logger = logging.getLogger("decoding.evaluation")


@dataclass
class LabeledUtterance:
    """Decoder input of one utterance with its frame labels.

    Attributes:
        frames: T x D observed features
        variances: T x D variances of the distortion model
        labels: T class indices
        name: Identifier used in reports
    """

    frames: np.ndarray
    variances: np.ndarray
    labels: np.ndarray
    name: str = "utt"

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.frames.shape != self.variances.shape:
            raise DimensionError(f"{self.name}: frames {self.frames.shape} and variances {self.variances.shape} differ")
        if self.labels.shape != (self.frames.shape[0],):
            raise DimensionError(f"{self.name}: {self.labels.shape[0]} labels for {self.frames.shape[0]} frames")

    @classmethod
    def from_features(cls, features: UtteranceFeatures, labels: np.ndarray, name: str = "utt") -> "LabeledUtterance":
        return cls(features.frames, features.full_variances(), labels, name)

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]


@dataclass
class AccuracyReport:
    """Frame classification accuracy of one decode mode."""

    mode: str
    num_samples: int
    seed: int
    num_frames: int
    correct: int
    accuracy: float
    margin_mean: float
    margin_median: float
    per_utterance: List[Dict[str, Union[str, int, float]]] = field(default_factory=list)

    def to_row(self) -> Dict[str, Union[str, int, float]]:
        """Flat summary without the per-utterance breakdown."""
        row = asdict(self)
        row.pop("per_utterance")
        return row


def decode_utterances(model: MlpModel, inputs: Sequence[Tuple[np.ndarray, np.ndarray]], mode: str,
                      num_samples: int, seed: int, context: int = CONTEXT_FRAMES, clip: str = "none",
                      jobs: int = 1, factory: Optional[DecoderFactory] = None) -> List[np.ndarray]:
    """Posteriors of every (frames, variances) pair.

    Utterance u samples with a seed derived from (seed, u), so results do
    not depend on ``jobs``.
    """
    factory = factory or DecoderFactory(model, context)
    decoder = factory.get_decoder(mode, context)

    def _decode(item):
        index, (frames, variances) = item
        return decoder.decode_utterance(frames, variances, num_samples, derive_seed(seed, "utterance", index), clip)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_decode, enumerate(inputs)))
    return [_decode(item) for item in enumerate(inputs)]


def accuracy_report(posteriors: Sequence[np.ndarray], utterances: Sequence[LabeledUtterance], mode: str,
                    num_samples: int, seed: int) -> AccuracyReport:
    """Summarize decoded posteriors against the utterance labels."""
    per_utterance = []
    margins = []
    correct = 0
    for post, utt in zip(posteriors, utterances):
        hits = int(np.sum(np.argmax(post, axis=1) == utt.labels))
        correct += hits
        margins.append(sample_margins(post))
        per_utterance.append({"name": utt.name, "frames": utt.num_frames, "correct": hits,
                              "accuracy": hits / utt.num_frames})
    margins = np.concatenate(margins)
    num_frames = int(margins.shape[0])
    return AccuracyReport(
        mode=mode,
        num_samples=1 if mode == "baseline" else int(num_samples),
        seed=int(seed),
        num_frames=num_frames,
        correct=correct,
        accuracy=correct / num_frames,
        margin_mean=float(np.mean(margins)),
        margin_median=float(np.median(margins)),
        per_utterance=per_utterance,
    )


def evaluate_frame_accuracy(model: MlpModel, utterances: Sequence[LabeledUtterance], mode: str,
                            num_samples: int, seed: int, context: int = CONTEXT_FRAMES, clip: str = "none",
                            jobs: int = 1, factory: Optional[DecoderFactory] = None) -> AccuracyReport:
    """Frame accuracy of one decode mode over labeled utterances.

    Raises:
        ValidationError: If no utterances (or only empty ones) are given
    """
    if not utterances or sum(utt.num_frames for utt in utterances) == 0:
        raise ValidationError("Evaluation needs at least one labeled frame")
    inputs = [(utt.frames, utt.variances) for utt in utterances]
    posteriors = decode_utterances(model, inputs, mode, num_samples, seed, context, clip, jobs, factory)
    report = accuracy_report(posteriors, utterances, mode, num_samples, seed)
    logger.info(f"{mode} (L={report.num_samples}): accuracy {report.accuracy:.4f} on {report.num_frames} frames")
    return report


def evaluate_modes(model: MlpModel, utterances: Sequence[LabeledUtterance], num_samples: int, seed: int,
                   context: int = CONTEXT_FRAMES, clip: str = "none", jobs: int = 1) -> List[AccuracyReport]:
    """Reports of all three decode modes with shared decoders."""
    factory = DecoderFactory(model, context)
    return [evaluate_frame_accuracy(model, utterances, mode, num_samples, seed, context, clip, jobs, factory)
            for mode in DECODE_MODES]


def sweep_num_samples(model: MlpModel, utterances: Sequence[LabeledUtterance], grid: Sequence[int], seed: int,
                      context: int = CONTEXT_FRAMES, clip: str = "none", jobs: int = 1) -> pd.DataFrame:
    """Accuracy of arithmetic and weighted averaging over a grid of sample counts.

    The baseline accuracy is repeated at every grid point for reference.

    Returns:
        DataFrame with columns mode, num_samples, accuracy
    """
    factory = DecoderFactory(model, context)
    baseline = evaluate_frame_accuracy(model, utterances, "baseline", 1, seed, context, clip, jobs, factory)
    rows = []
    for num_samples in grid:
        rows.append({"mode": "baseline", "num_samples": int(num_samples), "accuracy": baseline.accuracy})
        for mode in ("arithmetic", "weighted"):
            report = evaluate_frame_accuracy(model, utterances, mode, num_samples, seed, context, clip, jobs, factory)
            rows.append({"mode": mode, "num_samples": int(num_samples), "accuracy": report.accuracy})
    return pd.DataFrame(rows, columns=["mode", "num_samples", "accuracy"])


def write_reports(reports: Sequence[AccuracyReport], json_path: Union[str, Path], csv_path: Union[str, Path]) -> None:
    """Write reports as JSON (with per-utterance detail) and as a flat CSV table."""
    payload = {"reports": [asdict(report) for report in reports]}
    atomic_write_text(json_path, simplejson.dumps(payload, indent=2, sort_keys=True) + "\n")
    write_table(pd.DataFrame([report.to_row() for report in reports]), csv_path)
    logger.info(f"Wrote reports to {json_path} and {csv_path}")


def write_table(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    return atomic_write(path, lambda tmp: frame.to_csv(tmp, index=False, float_format="%.10g"))


def plot_sweep(sweep: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Plot accuracy against the number of samples for every decode mode."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 5))
    for mode, group in sweep.groupby("mode", sort=False):
        style = "--" if mode == "baseline" else "-o"
        ax.plot(group["num_samples"], group["accuracy"], style, label=mode)

    ax.set_xscale("log")
    ax.set_xlabel("Number of samples L")
    ax.set_ylabel("Frame accuracy")
    ax.set_title("Uncertainty decoding accuracy vs. number of samples")
    ax.legend()

    target = atomic_write(path, lambda tmp: fig.savefig(tmp, format="png", metadata={"Software": None}))
    plt.close(fig)
    return target
