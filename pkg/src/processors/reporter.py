"""Rendering of run reports and unit explanations.

Two renderings exist: an operator-facing text report (solutions as indented
unit trees, an optional phase table) and the ``report/1`` structured document
read back by :class:`src.parsers.report_parser.ReportParser`.
"""

from typing import Dict, List, Optional, Sequence

import logging

from tabulate import tabulate

from ..core.units import PhaseTrace, Report, Solution, Unit
from ..config import INPUT_CONFIG
from ..parsers.report_parser import EMPTY, flag, join_ids
from ..utils.formatting import format_ids, format_interval, format_weights
from .certainty import CertaintyModel


logger = logging.getLogger(__name__)


class UnknownUnitError(LookupError):
    """Raised when an explanation is asked for a unit the report lacks."""

    def __init__(self, unit_id: str):
        self.unit_id = unit_id
        super().__init__(f"Unit '{unit_id}' does not appear in the report")


def render_structured(report: Report) -> str:
    """Render ``report`` as a ``report/1`` document.

    The output is a pure function of the report, so two identical runs give
    byte-identical documents.
    """
    lines = [INPUT_CONFIG['report']['header']]
    for key, value in report.meta:
        lines.append(f"meta {key} {value}" if value else f"meta {key}")
    for phase in report.trace:
        lines.append(
            f"phase level={phase.level} memories={phase.memories} hypotheses={phase.hypotheses} "
            f"nogoods={phase.nogoods} solutions={phase.solutions} inspections={phase.inspections} "
            f"bound={phase.bound} passed={flag(phase.passed_through)}"
        )
    for rank, solution in enumerate(report.solutions, start=1):
        lines.append(
            f"solution rank={rank} level={solution.level} "
            f"members={join_ids(u.id for u in solution.members)} "
            f"unexplained={join_ids(u.id for u in solution.unexplained)}"
        )
        for unit in solution.units:
            lines.append(
                f"unit solution={rank} id={unit.id} level={unit.level} type={unit.type} "
                f"start={unit.start} end={unit.end} axes={join_ids(sorted(unit.axes))} "
                f"subs={join_ids(unit.sub_units)} certainty={unit.certainty} "
                f"complete={flag(unit.complete)} leaves={join_ids(sorted(unit.leaves))} "
                f"template={unit.template or EMPTY}"
            )
        for record in solution.evidence:
            for assumptions, degree in record.environments:
                lines.append(
                    f"env solution={rank} unit={record.unit_id} "
                    f"assumptions={join_ids(assumptions)} degree={degree}"
                )
            for other, degree in record.conflicts:
                lines.append(f"conflict solution={rank} unit={record.unit_id} with={other} degree={degree}")
    return '\n'.join(lines) + '\n'


def _describe(unit: Unit) -> str:
    state = 'observed' if unit.observed else ('complete' if unit.complete else 'incomplete')
    return (
        f"{unit.id}  {unit.level} {unit.type}  {format_interval(unit.start, unit.end)}  "
        f"axes {format_ids(unit.axes)}  certainty {unit.certainty}  {state}"
    )


def _tree(unit: Unit, units: Dict[str, Unit], depth: int, lines: List[str]) -> None:
    lines.append('  ' * depth + _describe(unit))
    for sub in unit.sub_units:
        if sub in units:
            _tree(units[sub], units, depth + 1, lines)
        else:
            lines.append('  ' * (depth + 1) + f"{sub}  (no record)")


def trace_table(trace: Sequence[PhaseTrace]) -> str:
    """Phase counts as a table."""
    rows = [
        [p.level, p.memories, p.hypotheses, p.nogoods, p.solutions,
         f"{p.inspections}/{p.bound}", 'yes' if p.passed_through else 'no']
        for p in trace
    ]
    headers = ['phase', 'memories', 'hypotheses', 'nogoods', 'solutions', 'inspections/bound', 'passed']
    return tabulate(rows, headers=headers, tablefmt='simple')


def render_text(report: Report, trace: bool = False) -> str:
    """Render ``report`` for an operator.

    Args:
        report: The run report.
        trace: Append the per-phase table.

    Returns:
        The text report, ending with a newline.
    """
    lines = [f"{key}: {value}" for key, value in report.meta]
    if not report.solutions:
        lines.append('')
        lines.append('No solutions.')
    else:
        rows = [
            [rank, s.level, len(s.members), format_weights(s.certainties), len(s.unexplained)]
            for rank, s in enumerate(report.solutions, start=1)
        ]
        lines.append('')
        lines.append(tabulate(rows, headers=['rank', 'level', 'members', 'certainties', 'unexplained'],
                              tablefmt='simple'))
    for rank, solution in enumerate(report.solutions, start=1):
        units = solution.unit_map()
        lines.append('')
        lines.append(f"Solution {rank} ({solution.level})")
        for member in solution.members:
            _tree(member, units, 1, lines)
        if solution.unexplained:
            lines.append('  unexplained:')
            for unit in solution.unexplained:
                _tree(unit, units, 2, lines)
    if trace:
        lines.append('')
        lines.append(trace_table(report.trace) if report.trace else 'No phases run.')
    return '\n'.join(lines) + '\n'


def explain(report: Report, unit_id: str, model: Optional[CertaintyModel] = None) -> str:
    """Explain why ``unit_id`` is believed in the best solution holding it.

    Lists the label environments with their degrees, the justification chain
    down to the leaf observations and the hypotheses it conflicts with.

    Args:
        report: A parsed structured report.
        unit_id: Unit to explain.
        model: When given, aggregate certainties are broken into factors.

    Raises:
        UnknownUnitError: If no solution of the report holds the unit.

    Example:
        >>> print(explain(report, 'S1'))
    """
    found = report.find(unit_id)
    if found is None:
        raise UnknownUnitError(unit_id)
    solution, unit = found
    rank = report.solutions.index(solution) + 1
    units = solution.unit_map()
    logger.debug(f"Explaining {unit_id} from solution {rank}")

    lines = [f"Unit {unit.id} in solution {rank} ({solution.level})", '  ' + _describe(unit)]
    if not unit.observed and model is not None:
        template = model.doctrine.template(unit.template) if unit.template else model.doctrine.template_for(unit)
        factors = model.factors(template, len(unit.sub_units), unit.span)
        lines.append(
            f"  certainty = min(base {factors.base}, completeness {factors.completeness}, "
            f"temporal {factors.temporal}) = {factors.certainty}  [template {template.name}]"
        )

    evidence = solution.evidence_for(unit.id)
    lines.append('Label:')
    if evidence is None or not evidence.environments:
        lines.append('  (none recorded)')
    else:
        for assumptions, degree in evidence.environments:
            lines.append(f"  {{{format_ids(assumptions, empty='')}}}  {degree}")

    lines.append('Justification:')
    chain: List[str] = []
    _tree(unit, units, 1, chain)
    lines.extend(chain)
    if not unit.observed:
        lines.append(f"  leaves: {format_ids(unit.leaves)}")

    lines.append('Conflicts:')
    if evidence is None or not evidence.conflicts:
        lines.append('  none')
    else:
        for other, degree in evidence.conflicts:
            lines.append(f"  {other}  nogood degree {degree}")
    return '\n'.join(lines) + '\n'
