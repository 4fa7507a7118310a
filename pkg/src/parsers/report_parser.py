"""Parser for structured run reports.

The structured report is written by :func:`src.processors.reporter.render_structured`::

    format report/1
    meta <key> <value>
    phase level=<level> memories=<n> hypotheses=<n> nogoods=<n> solutions=<n> inspections=<n> bound=<n> passed=yes|no
    solution rank=<n> level=<level> members=<ids> unexplained=<ids>
    unit solution=<n> id=<id> level=<level> type=<type> start=<min> end=<min> axes=<ids> subs=<ids> certainty=<w> complete=yes|no leaves=<ids> template=<name>
    env solution=<n> unit=<id> assumptions=<ids> degree=<w>
    conflict solution=<n> unit=<id> with=<id> degree=<w>

Lists are comma separated; ``-`` stands for an empty list or no value.
"""

from collections import OrderedDict
from typing import Any, Dict, List, Optional, Tuple

from ..core.base_parser import BaseParser
from ..core.units import Evidence, PhaseTrace, Report, Solution, Unit
from ..core.weights import Weight, WeightError


EMPTY = '-'


def split_ids(value: str) -> Tuple[str, ...]:
    return () if value == EMPTY else tuple(value.split(','))


def join_ids(values) -> str:
    values = list(values)
    return ','.join(values) if values else EMPTY


def flag(value: bool) -> str:
    return 'yes' if value else 'no'


class ReportParser(BaseParser):
    """Parser for ``report/1`` documents (the input of ``explain``).

    Example:
        >>> report = ReportParser('run.rpt').process()['data']
    """

    kind = 'report'

    RECORD_FIELDS = {
        'phase': ('level', 'memories', 'hypotheses', 'nogoods', 'solutions', 'inspections', 'bound', 'passed'),
        'solution': ('rank', 'level', 'members', 'unexplained'),
        'unit': ('solution', 'id', 'level', 'type', 'start', 'end', 'axes', 'subs',
                 'certainty', 'complete', 'leaves', 'template'),
        'env': ('solution', 'unit', 'assumptions', 'degree'),
        'conflict': ('solution', 'unit', 'with', 'degree'),
    }

    def _fields(self, record: str, rest: str, line: int) -> Dict[str, str]:
        fields = self._split_fields(rest, line)
        expected = self.RECORD_FIELDS[record]
        if set(fields) != set(expected):
            missing = sorted(set(expected) - set(fields))
            extra = sorted(set(fields) - set(expected))
            raise self.error(f"Bad '{record}' record (missing {missing}, unexpected {extra})", line)
        return fields

    def _int(self, value: str, line: int) -> int:
        try:
            return int(value)
        except ValueError:
            raise self.error(f"Expected an integer, got '{value}'", line) from None

    def _weight(self, value: str, line: int) -> Weight:
        try:
            return Weight(value)
        except WeightError as e:
            raise self.error(str(e), line) from None

    def _flag(self, value: str, line: int) -> bool:
        if value not in ('yes', 'no'):
            raise self.error(f"Expected yes or no, got '{value}'", line)
        return value == 'yes'

    def parse(self) -> Dict[str, Any]:
        """Parse a structured report.

        Returns:
            Dictionary with 'metadata' and 'data' (a :class:`Report`).

        Raises:
            FileFormatError: On malformed records, with the line number.
            ValidationError: On records referring to unknown solutions.
        """
        if not self.is_loaded:
            self.load()

        meta: List[Tuple[str, str]] = []
        trace: List[PhaseTrace] = []
        heads: 'OrderedDict[int, Tuple[Dict[str, str], int]]' = OrderedDict()
        units: Dict[int, List[Unit]] = {}
        environments: Dict[Tuple[int, str], List[Tuple[Tuple[str, ...], Weight]]] = OrderedDict()
        conflicts: Dict[Tuple[int, str], List[Tuple[str, Weight]]] = OrderedDict()

        for line, text in self._body_lines():
            record, _, rest = text.partition(' ')
            if record == 'meta':
                key, _, value = rest.partition(' ')
                if not key:
                    raise self.error("meta needs a key", line)
                meta.append((key, value.strip()))
                continue
            if record not in self.RECORD_FIELDS:
                raise self.error(f"Unknown record '{record}'", line)
            fields = self._fields(record, rest, line)

            if record == 'phase':
                trace.append(PhaseTrace(
                    level=fields['level'],
                    memories=self._int(fields['memories'], line),
                    hypotheses=self._int(fields['hypotheses'], line),
                    nogoods=self._int(fields['nogoods'], line),
                    solutions=self._int(fields['solutions'], line),
                    inspections=self._int(fields['inspections'], line),
                    bound=self._int(fields['bound'], line),
                    passed_through=self._flag(fields['passed'], line),
                ))
                continue
            if record == 'solution':
                rank = self._int(fields['rank'], line)
                if rank in heads:
                    raise self.invalid(f"Duplicate solution rank {rank}", line)
                heads[rank] = (fields, line)
                units[rank] = []
                continue

            rank = self._int(fields['solution'], line)
            if rank not in heads:
                raise self.invalid(f"Record refers to unknown solution {rank}", line)
            if record == 'unit':
                try:
                    units[rank].append(Unit(
                        id=fields['id'],
                        level=fields['level'],
                        type=fields['type'],
                        start=self._int(fields['start'], line),
                        end=self._int(fields['end'], line),
                        axes=frozenset(split_ids(fields['axes'])),
                        sub_units=split_ids(fields['subs']),
                        certainty=self._weight(fields['certainty'], line),
                        complete=self._flag(fields['complete'], line),
                        leaves=frozenset(split_ids(fields['leaves'])),
                        template=None if fields['template'] == EMPTY else fields['template'],
                    ))
                except ValueError as e:
                    raise self.error(str(e), line) from None
            elif record == 'env':
                environments.setdefault((rank, fields['unit']), []).append(
                    (split_ids(fields['assumptions']), self._weight(fields['degree'], line))
                )
            else:
                conflicts.setdefault((rank, fields['unit']), []).append(
                    (fields['with'], self._weight(fields['degree'], line))
                )

        solutions = []
        for rank, (fields, line) in heads.items():
            by_id = {u.id: u for u in units[rank]}
            missing = [i for i in split_ids(fields['members']) + split_ids(fields['unexplained'])
                       if i not in by_id]
            if missing:
                raise self.invalid(f"Solution {rank} names units without records: {missing}", line)
            evidence_ids = sorted(
                {u for (r, u) in environments if r == rank} | {u for (r, u) in conflicts if r == rank}
            )
            evidence = tuple(
                Evidence(
                    unit_id,
                    tuple(environments.get((rank, unit_id), ())),
                    tuple(conflicts.get((rank, unit_id), ())),
                )
                for unit_id in evidence_ids
            )
            solutions.append(Solution(
                level=fields['level'],
                members=tuple(by_id[i] for i in split_ids(fields['members'])),
                unexplained=tuple(by_id[i] for i in split_ids(fields['unexplained'])),
                units=tuple(units[rank]),
                evidence=evidence,
            ))

        self._data = Report(tuple(meta), tuple(solutions), tuple(trace))
        self.metadata.update({
            'data_type': 'report',
            'solution_count': len(solutions),
            'phase_count': len(trace),
        })
        self._is_parsed = True
        self.logger.info(f"Parsed report with {len(solutions)} solutions from {self.source}")
        return {'metadata': self.metadata, 'data': self.data}

    def validate(self, data: Optional[Report] = None) -> bool:
        """Validate that every sub-unit named in the report has a record.

        Raises:
            ValidationError: On dangling sub-unit references.
        """
        if data is None:
            data = self.data
        if data is None:
            raise self.invalid("No data to validate")
        for rank, solution in enumerate(data.solutions, start=1):
            known = {u.id for u in solution.units}
            for unit in solution.units:
                dangling = [s for s in unit.sub_units if s not in known]
                if dangling:
                    raise self.invalid(f"Solution {rank}: unit {unit.id} names unknown sub-units {dangling}")
        self._is_validated = True
        return True
