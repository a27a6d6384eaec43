"""Platform paths and runtime information."""

import logging
import os
import sys
from pathlib import Path

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

LOG_DIR_ENV_VAR = "BONDSPAN_LOG_DIR"


def get_log_dir() -> Path:
    """
    Directory for log files.

    ``BONDSPAN_LOG_DIR`` wins; otherwise the platform's usual location.
    """
    override = os.environ.get(LOG_DIR_ENV_VAR)
    if override:
        return Path(override)
    if sys.platform == "darwin":
        return Path.home() / "Library" / "Logs" / "bondspan"
    if sys.platform == "win32":
        local = os.environ.get("LOCALAPPDATA")
        base = Path(local) if local else Path.home() / "AppData" / "Local"
        return base / "bondspan" / "Logs"
    return Path.home() / ".local" / "share" / "bondspan" / "logs"


def describe_runtime() -> dict[str, str]:
    """
    Versions of the interpreter and numerical stack.

    Returns:
        Dictionary with platform, python, numpy and networkx entries
    """
    return {
        "platform": sys.platform,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "networkx": nx.__version__,
    }
