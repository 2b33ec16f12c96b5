"""Logging configuration for subfield.
"""

import logging
import logging.config
from typing import Any, Dict, Optional

from subfield.core.config import get_settings

# Define logging format
LOG_FORMAT = "%(asctime)s - %(name)s:%(lineno)d - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def build_logging_config(level: str) -> Dict[str, Any]:
    """Builds the dictConfig mapping for the given root level.

    Args:
        level: Level name for the root logger and console handler.

    Returns:
        A configuration dictionary accepted by ``logging.config.dictConfig``.
    """
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "default": {
                "format": LOG_FORMAT,
                "datefmt": DATE_FORMAT,
            },
        },
        "handlers": {
            "console": {
                "level": level,
                "class": "logging.StreamHandler",
                "formatter": "default",
                # stdout is reserved for CLI summaries
                "stream": "ext://sys.stderr",
            },
        },
        "loggers": {
            "": {
                "handlers": ["console"],
                "level": level,
                "propagate": True,
            },
            "numpy": {
                "level": logging.WARNING,
                "handlers": ["console"],
                "propagate": False,
            },
            "scipy": {
                "level": logging.WARNING,
                "handlers": ["console"],
                "propagate": False,
            },
        },
    }


LOGGING_CONFIG = build_logging_config("INFO")


def configure_logging(level: Optional[str] = None) -> str:
    """Applies the logging configuration.

    Args:
        level: Explicit level name; falls back to ``Settings.log_level``.

    Returns:
        The level name that was applied.
    """
    resolved = (level or get_settings().log_level).upper()
    if not isinstance(logging.getLevelName(resolved), int):
        raise ValueError(f"Unknown log level: {resolved}")
    logging.config.dictConfig(build_logging_config(resolved))
    return resolved
