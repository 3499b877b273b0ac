# Resolved run configuration of one CLI invocation

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, field_validator

from ..utils.exceptions import ConfigError
from ..utils.fileio import atomic_write_text
from .config import (
    BATCH_SIZE,
    CDR_MAX,
    CONTEXT_FRAMES,
    DEFAULT_SAMPLE_RATE,
    DEFAULT_SEED,
    DFT_LENGTH,
    EPOCHS,
    FORGETTING_FACTOR,
    GAMMA_DIFF_MODE,
    HIDDEN_SIZES,
    HOP_LENGTH,
    ISOTROPIC_DIRECTIONS,
    LEARNING_RATE,
    LOG_LEVEL,
    MOMENTUM,
    N_MEL_FILTERS,
    NUM_SAMPLES,
    VARIANCE_SCALE,
    WINDOW,
)

logger = logging.getLogger("config.run_config")

SUBCOMMANDS = ("simulate", "extract", "train", "decode", "eval")

_LIST_FIELDS = ("doa", "wav", "features", "variances", "labels", "hidden", "num_samples_grid")


class RunConfig(BaseModel):
    """Every parameter of a run; its echo file replays the run exactly.

    Angles are in degrees; paths are stored as given on the command line.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    subcommand: str
    output_dir: str = "."
    seed: int = DEFAULT_SEED
    log_level: str = LOG_LEVEL

    # simulate
    geometry: Optional[str] = None
    doa: Tuple[float, float] = (0.0, 0.0)
    drr: float = 0.0
    duration: float = Field(1.0, gt=0)
    sample_rate: int = Field(DEFAULT_SAMPLE_RATE, gt=0)
    directions: int = Field(ISOTROPIC_DIRECTIONS, ge=64)
    encoding: str = "float32"
    name: str = "scene"

    # extract
    wav: List[str] = []
    dft_length: int = DFT_LENGTH
    hop: int = HOP_LENGTH
    window: str = WINDOW
    forgetting_factor: float = Field(FORGETTING_FACTOR, gt=0, lt=1)
    var_scale: float = Field(VARIANCE_SCALE, ge=0)
    cdr_max: float = Field(CDR_MAX, gt=0)
    n_mel: int = Field(N_MEL_FILTERS, ge=1)
    gamma_diff_mode: str = GAMMA_DIFF_MODE
    beamform: bool = True
    jobs: int = Field(1, ge=1)

    # train
    features: List[str] = []
    labels: List[str] = []
    synthetic: bool = False
    train_frames: int = Field(12000, ge=1)
    hidden: Tuple[int, ...] = HIDDEN_SIZES
    epochs: int = Field(EPOCHS, ge=0)
    batch_size: int = Field(BATCH_SIZE, ge=1)
    lr: float = Field(LEARNING_RATE, ge=0)
    momentum: float = Field(MOMENTUM, ge=0, lt=1)
    context: int = Field(CONTEXT_FRAMES, ge=0)
    model: Optional[str] = None

    # decode / eval
    variances: List[str] = []
    mode: str = "weighted"
    num_samples: int = Field(NUM_SAMPLES, ge=1)
    clip: str = "none"
    num_samples_grid: Tuple[int, ...] = (1, 3, 10, 30, 100)
    eval_seeds: int = Field(10, ge=2)
    eval_frames: int = Field(4000, ge=1)
    plot: bool = False

    @field_validator("subcommand")
    @classmethod
    def _known_subcommand(cls, value):
        if value not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand {value}")
        return value

    @field_validator(*_LIST_FIELDS, mode="before")
    @classmethod
    def _split_lists(cls, value):
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("geometry", "model", mode="before")
    @classmethod
    def _empty_is_none(cls, value):
        return None if value == "" else value

    @field_validator("mode")
    @classmethod
    def _known_mode(cls, value):
        if value not in ("baseline", "arithmetic", "weighted"):
            raise ValueError(f"unknown decode mode {value}")
        return value

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)

    def to_text(self) -> str:
        """Flat ``key=value`` form read back by :func:`load_config_file`."""
        lines = []
        for key, value in self.model_dump().items():
            lines.append(f"{key}={_format_value(value)}")
        return "\n".join(lines) + "\n"

    def echo(self) -> Path:
        """Write ``<output_dir>/<subcommand>.run.cfg``."""
        target = atomic_write_text(self.output_path / f"{self.subcommand}.run.cfg", self.to_text())
        logger.debug(f"Echoed run config to {target}")
        return target


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read a flat key=value config file.

    Raises:
        ConfigError: If the file does not exist
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    values = {key: value for key, value in dotenv_values(path).items() if value is not None}
    logger.debug(f"Loaded {len(values)} settings from {path}")
    return values


def resolve_run_config(subcommand: str, cli_values: Dict[str, Any], config_path: Optional[Union[str, Path]] = None) -> RunConfig:
    """Merge defaults, config file and command-line values (later wins).

    Raises:
        ConfigError: If a value is invalid or a key is unknown
    """
    merged: Dict[str, Any] = {}
    if config_path is not None:
        merged.update(load_config_file(config_path))
    merged.update({key: value for key, value in cli_values.items() if value is not None})
    merged["subcommand"] = subcommand
    try:
        return RunConfig(**merged)
    except PydanticValidationError as e:
        raise ConfigError(f"Invalid configuration for {subcommand}: {e}") from e
