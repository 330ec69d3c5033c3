"""
Logging setup driven by the ADACUBE_LOG environment variable (off|info|debug).

Library modules only call logging.getLogger(__name__); configure_logging() is
invoked once by the command line entry point.
"""

import logging
import os

from dotenv import load_dotenv

LOG_ENV_VAR = "ADACUBE_LOG"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_LEVELS = {
    "off": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def resolve_level(value: str | None) -> int:
    """
    Map an ADACUBE_LOG value onto a logging level.

    Args:
        value: Raw value of the variable, or None when unset

    Returns:
        A logging level; unknown values map to INFO
    """
    if value is None or not value.strip():
        return _LEVELS["off"]
    return _LEVELS.get(value.strip().lower(), logging.INFO)


def configure_logging() -> int:
    """Load .env, read ADACUBE_LOG and configure the root logger. Returns the level."""
    load_dotenv()
    raw = os.getenv(LOG_ENV_VAR)
    level = resolve_level(raw)
    logging.basicConfig(level=level, format=LOG_FORMAT)
    if raw is not None and raw.strip().lower() not in _LEVELS:
        logging.getLogger(__name__).warning(f"Unknown {LOG_ENV_VAR}={raw!r}, using 'info'")
    return level
