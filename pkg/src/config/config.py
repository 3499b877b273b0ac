# Configuration settings for the SpatialUD system

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

def _env(name: str, default: str) -> str:
    return os.getenv(f"SPATIALUD_{name}", default)

# Acoustic scene configuration
DEFAULT_SAMPLE_RATE = int(_env("SAMPLE_RATE", "16000"))
SPEED_OF_SOUND = float(_env("SPEED_OF_SOUND", "343.0"))  # m/s
ISOTROPIC_DIRECTIONS = int(_env("ISOTROPIC_DIRECTIONS", "512"))
MIN_ISOTROPIC_DIRECTIONS = 64
FRACTIONAL_DELAY_TAPS = 64
DEFAULT_ARRAY_MICS = 8
DEFAULT_ARRAY_SPACING = 0.08  # adjacent spacing of the circular array, m

# STFT front-end configuration
DFT_LENGTH = int(_env("DFT_LENGTH", "512"))
HOP_LENGTH = int(_env("HOP_LENGTH", "128"))
WINDOW = _env("WINDOW", "sqrt-hann")
FORGETTING_FACTOR = float(_env("FORGETTING_FACTOR", "0.8"))
POWER_EPSILON = 1e-12  # relative to mean frame power

# Spatial diffuseness configuration
CDR_MAX = float(_env("CDR_MAX", "1e4"))
N_MEL_FILTERS = int(_env("N_MEL_FILTERS", "24"))
GAMMA_DIFF_MODE = _env("GAMMA_DIFF_MODE", "clip")
VARIANCE_SCALE = float(_env("VARIANCE_SCALE", "0.1"))

# Feature pipeline configuration
LOG_FLOOR_RELATIVE = 1e-10
LOG_FLOOR_ABSOLUTE = 1e-20
DELTA_WINDOW = 2
CONTEXT_FRAMES = int(_env("CONTEXT_FRAMES", "5"))

# Uncertainty decoding configuration
NUM_SAMPLES = int(_env("NUM_SAMPLES", "30"))
WEIGHT_EPSILON = 1e-15
DEFAULT_SEED = int(_env("SEED", "0"))

# Trainer configuration
HIDDEN_SIZES = tuple(int(h) for h in _env("HIDDEN_SIZES", "64,64").split(",") if h)
EPOCHS = int(_env("EPOCHS", "20"))
BATCH_SIZE = int(_env("BATCH_SIZE", "64"))
LEARNING_RATE = float(_env("LEARNING_RATE", "0.1"))
MOMENTUM = float(_env("MOMENTUM", "0.9"))

# Logging Configuration
LOG_LEVEL = _env("LOG_LEVEL", "INFO")
LOG_TO_FILE = _env("LOG_TO_FILE", "false").lower() in ("1", "true", "yes")
