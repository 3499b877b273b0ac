# Config package initialization

from .config import (
    CDR_MAX,
    DEFAULT_SAMPLE_RATE,
    DFT_LENGTH,
    FORGETTING_FACTOR,
    LOG_LEVEL,
    LOG_TO_FILE,
    NUM_SAMPLES
)
from .run_config import RunConfig, resolve_run_config

__all__ = [
    'CDR_MAX',
    'DEFAULT_SAMPLE_RATE',
    'DFT_LENGTH',
    'FORGETTING_FACTOR',
    'LOG_LEVEL',
    'LOG_TO_FILE',
    'NUM_SAMPLES',
    'RunConfig',
    'resolve_run_config'
]
