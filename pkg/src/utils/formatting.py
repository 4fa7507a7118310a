"""Formatting helpers for reports."""

from typing import Iterable

from ..core.weights import Weight


def format_minutes(minutes: int) -> str:
    """Render a minute offset as ``HH:MM``.

    Example:
        >>> format_minutes(65)
        '01:05'
    """
    if minutes < 0:
        raise ValueError(f"Negative minute offset: {minutes}")
    hours, rest = divmod(minutes, 60)
    return f"{hours:02d}:{rest:02d}"


def format_interval(start: int, end: int) -> str:
    """``HH:MM`` for an instant, ``HH:MM-HH:MM`` for an interval."""
    if start == end:
        return format_minutes(start)
    return f"{format_minutes(start)}-{format_minutes(end)}"


def format_ids(ids: Iterable[str], empty: str = '-') -> str:
    ids = sorted(ids)
    return ', '.join(ids) if ids else empty


def format_weights(weights: Iterable[Weight]) -> str:
    return ', '.join(str(w) for w in weights) or '-'
