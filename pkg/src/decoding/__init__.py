# Decoding package initialization

from .arithmetic_decoder import ArithmeticDecoder, decode_frame_arithmetic
from .base_decoder import BaseDecoder
from .baseline_decoder import BaselineDecoder, decode_frame_baseline
from .decoder_factory import DECODE_MODES, DecoderFactory
from .evaluation import AccuracyReport, LabeledUtterance, evaluate_frame_accuracy
from .mlp import MlpModel, PosteriorVector, forward
from .model_io import load_model, save_model
from .sampler import FeatureDistribution, SampleSet, clip_policy, draw_samples
from .trainer import LabeledDataset, TrainConfig, train_mlp
from .weighted_decoder import SampleWeights, WeightedDecoder, decode_frame_weighted, mce_weights

__all__ = [
    'ArithmeticDecoder',
    'BaseDecoder',
    'BaselineDecoder',
    'WeightedDecoder',
    'DECODE_MODES',
    'DecoderFactory',
    'AccuracyReport',
    'LabeledUtterance',
    'evaluate_frame_accuracy',
    'MlpModel',
    'PosteriorVector',
    'forward',
    'load_model',
    'save_model',
    'FeatureDistribution',
    'SampleSet',
    'clip_policy',
    'draw_samples',
    'LabeledDataset',
    'TrainConfig',
    'train_mlp',
    'SampleWeights',
    'decode_frame_arithmetic',
    'decode_frame_baseline',
    'decode_frame_weighted',
    'mce_weights'
]
