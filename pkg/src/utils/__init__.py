# Utils package initialization

from .logger import setup_logging
from .rng import derive_key, derive_seed, philox_generator
from .validators import validate_geometry, validate_probability_rows

__all__ = [
    'setup_logging',
    'derive_key',
    'derive_seed',
    'philox_generator',
    'validate_geometry',
    'validate_probability_rows'
]
