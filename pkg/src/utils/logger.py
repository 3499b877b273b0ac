# Logger setup utility

import logging
import os
from datetime import datetime
from pathlib import Path
from typing import Optional

# librosa pulls in numba, whose compiler logs flood DEBUG output
QUIET_LOGGERS = ("numba", "matplotlib", "PIL")

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(log_level: str = "INFO", log_to_file: bool = False, log_dir: Optional[str] = None,
                  run_name: str = "spatial_ud") -> logging.Logger:
    """Set up logging configuration for the SpatialUD system.

    Args:
        log_level: The logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_to_file: Whether to log to a file in addition to the console
        log_dir: Directory for log files; defaults to ``logs`` in the project root
        run_name: Stem of the log file, typically the CLI subcommand

    Returns:
        The configured root logger
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    logger = logging.getLogger()
    logger.setLevel(numeric_level)
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    formatter = logging.Formatter(LOG_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')
    console_handler = logging.StreamHandler()
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(numeric_level, logging.WARNING))

    if log_to_file:
        log_dir = Path(log_dir) if log_dir is not None else Path(__file__).parents[2] / "logs"
        os.makedirs(log_dir, exist_ok=True)
        log_file = log_dir / f"{run_name}_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"

        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
        logger.info(f"Logging to file: {log_file}")

    logger.debug(f"Logging initialized at level {log_level}")
    return logger
