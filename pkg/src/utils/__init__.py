"""Utility functions and helpers."""

from . import file_io
from . import formatting
from . import logger

__all__ = [
    'file_io',
    'formatting',
    'logger',
]
