"""possibilistic-fusion package.

Possibilistic truth maintenance, a forward-chaining rule engine and the
hierarchical aggregation of observed units built on them.
"""

__version__ = '0.1.0'
__author__ = 'possibilistic-fusion contributors'

from .core.base_parser import BaseParser, ParserError, ValidationError, FileFormatError
from .core.dispatcher import Dispatcher

__all__ = [
    'BaseParser',
    'ParserError',
    'ValidationError',
    'FileFormatError',
    'Dispatcher',
]
