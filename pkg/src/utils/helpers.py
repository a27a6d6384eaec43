"""Helper functions for bondspan reports and command-line parsing."""

import math
import re


def format_float(value: float, digits: int = 12) -> str:
    """
    Render a float with a fixed number of significant digits.

    Args:
        value: Number to format
        digits: Significant digits

    Returns:
        Formatted string; ``inf``/``nan`` are spelled out
    """
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}g}"


def parse_float_list(text: str) -> list[float]:
    """
    Parse a comma-separated list of positive numbers such as ``10,1e2,1000``.

    Raises:
        ValueError: if the list is empty or an item is not a positive number
    """
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("expected at least one number")
    values = []
    for item in items:
        value = float(item)
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"{item!r} is not a positive number")
        values.append(value)
    return values


def counterexample_filename(label: str) -> str:
    """
    File name for a counterexample instance.

    Characters other than letters, digits, dash and underscore are dropped.
    """
    stem = re.sub(r"[^A-Za-z0-9_-]+", "-", label).strip("-")
    return f"counterexample-{stem or 'instance'}.json"


def format_duration(seconds: float | None) -> str:
    """
    Format an elapsed time as ``MM:SS.s`` or ``HH:MM:SS``.

    Args:
        seconds: Elapsed seconds

    Returns:
        Formatted duration string
    """
    if seconds is None:
        return "unknown"
    if seconds < 3600:
        minutes, secs = divmod(seconds, 60)
        return f"{int(minutes):02d}:{secs:04.1f}"
    seconds = int(seconds)
    hours, rest = divmod(seconds, 3600)
    return f"{hours:02d}:{rest // 60:02d}:{rest % 60:02d}"
