"""
Configuration and logging setup for decoherence-kit
"""

import logging
import os
from typing import Optional

from dotenv import load_dotenv

# Constants
PROJECT_NAME = "decoherence-kit"
SCHEMA_VERSION = 1
CSV_DIGITS = 17
DEFAULT_SEED = 20050617
DEFAULT_SAMPLES = 1_000_000
LOG_FILE = "decokit.log"
LOG_FORMAT = "%(asctime)s - %(name)s - %(message)s"


def setup_logging(level: Optional[str] = None):
    """
    Configure logging for the command-line front end

    Args:
        level: Logging level name; falls back to DECOKIT_LOG_LEVEL, then INFO
    """
    level_name = (level or os.environ.get("DECOKIT_LOG_LEVEL") or "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=LOG_FORMAT,
        handlers=[logging.FileHandler(os.environ.get("DECOKIT_LOG_FILE", LOG_FILE))],
    )


def load_environment():
    """Load environment variables from .env file"""
    load_dotenv()


def _env_int(name: str) -> Optional[int]:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return None
    return int(raw)


def get_seed(cli_seed: Optional[int] = None) -> int:
    """
    Get the Monte-Carlo seed from the CLI flag, DECOKIT_SEED, or the default

    Returns:
        int: A seed in [0, 2**64)
    """
    seed = cli_seed if cli_seed is not None else _env_int("DECOKIT_SEED")
    if seed is None:
        seed = DEFAULT_SEED
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


def get_samples(cli_samples: Optional[int] = None) -> int:
    """Get the Monte-Carlo sample count from the CLI flag, DECOKIT_SAMPLES, or the default"""
    samples = cli_samples if cli_samples is not None else _env_int("DECOKIT_SAMPLES")
    return samples if samples is not None else DEFAULT_SAMPLES
