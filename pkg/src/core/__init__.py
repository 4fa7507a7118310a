"""Core engines: weights, oracle, Π-ATMS, rule engine, unit model and parsing."""

from .base_parser import BaseParser, ParserError, ValidationError, FileFormatError
from .weights import Weight, WeightError, UsageError
from .atms import PiATMS, ATMSError, UnknownNodeError, EnumerationLimitError
from .rule_engine import Rule, Rulebase, WorkingMemory, RuleEngineError
from .dispatcher import Dispatcher

__all__ = [
    'BaseParser',
    'ParserError',
    'ValidationError',
    'FileFormatError',
    'Weight',
    'WeightError',
    'UsageError',
    'PiATMS',
    'ATMSError',
    'UnknownNodeError',
    'EnumerationLimitError',
    'Rule',
    'Rulebase',
    'WorkingMemory',
    'RuleEngineError',
    'Dispatcher',
]
