# Frontend package initialization

from .coherence import (
    CoherenceFrame,
    array_coherence,
    coherence,
    equal_spacing_pairs,
    gamma_diff,
    isotropy_check,
    long_term_coherence,
)
from .stft import Spectrogram, StftConfig, stft

__all__ = [
    'CoherenceFrame',
    'array_coherence',
    'coherence',
    'equal_spacing_pairs',
    'gamma_diff',
    'isotropy_check',
    'long_term_coherence',
    'Spectrogram',
    'StftConfig',
    'stft'
]
