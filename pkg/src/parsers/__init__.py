"""Parsers for scenario, doctrine, rule and report files."""

from .scenario_parser import ScenarioParser
from .doctrine_parser import DoctrineParser
from .rule_parser import RuleParser
from .report_parser import ReportParser

__all__ = [
    'ScenarioParser',
    'DoctrineParser',
    'RuleParser',
    'ReportParser',
]
