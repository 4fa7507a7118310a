"""Fusion processing: certainty, hypotheses, aggregation and reporting."""

from .certainty import CertaintyModel
from .hypotheses import HypothesisGenerator, PrivateWorkingMemory
from .aggregator import PhaseAggregator, build_report, run_pipeline
from .solution_checker import SolutionChecker
from .reporter import render_structured, render_text, explain

__all__ = [
    'CertaintyModel',
    'HypothesisGenerator',
    'PrivateWorkingMemory',
    'PhaseAggregator',
    'build_report',
    'run_pipeline',
    'SolutionChecker',
    'render_structured',
    'render_text',
    'explain',
]
