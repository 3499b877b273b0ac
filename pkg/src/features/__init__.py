# Features package initialization

from .beamformer import beamform_das
from .diffuseness import (
    DiffusenessDistribution,
    DiffusenessTrack,
    cdr_from_coherence,
    diffuseness,
    extract_diffuseness,
    pool_pairs,
)
from .melbank import MelFilterbank, build_mel_filterbank, project_pair
from .pipeline import FeatureFrame, FeaturePipeline, UtteranceFeatures, assemble, deltas, logmelspec, mvn, splice

__all__ = [
    'beamform_das',
    'DiffusenessDistribution',
    'DiffusenessTrack',
    'cdr_from_coherence',
    'diffuseness',
    'extract_diffuseness',
    'pool_pairs',
    'MelFilterbank',
    'build_mel_filterbank',
    'project_pair',
    'FeatureFrame',
    'FeaturePipeline',
    'UtteranceFeatures',
    'assemble',
    'deltas',
    'logmelspec',
    'mvn',
    'splice'
]
