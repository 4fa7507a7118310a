"""Parser for scenario message files."""

from typing import Any, Dict, Optional, Tuple

from ..core.base_parser import BaseParser
from ..core.units import DoctrineError, Scenario, Unit, level_index
from ..core.weights import Weight, WeightError
from ..config import FUSION_CONFIG


class ScenarioParser(BaseParser):
    """Parser for line-oriented scenario files.

    Format::

        format scenario/1
        name four-sections            # optional
        obs id=S1 level=section type=tank axis=A1 t=0 conf=0.9
        obs id=S2 level=section type=tank axis=A1 t=10-25

    ``t`` is a minute offset or a ``start-end`` interval; ``conf`` defaults to
    the configured default confidence.

    Example:
        >>> parser = ScenarioParser('data/scenarios/four_sections.scn')
        >>> scenario = parser.process()['data']
    """

    kind = 'scenario'

    REQUIRED_FIELDS = ('id', 'level', 'type', 'axis', 't')
    OPTIONAL_FIELDS = ('conf',)

    def _time(self, value: str, line: int) -> Tuple[int, int]:
        start_text, sep, end_text = value.partition('-')
        try:
            start = int(start_text)
            end = int(end_text) if sep else start
        except ValueError:
            raise self.error(f"Invalid time '{value}'", line) from None
        if start < 0 or end < start:
            raise self.error(f"Invalid time interval '{value}'", line)
        return start, end

    def _observation(self, fields: Dict[str, str], line: int) -> Unit:
        missing = [f for f in self.REQUIRED_FIELDS if f not in fields]
        if missing:
            raise self.error(f"Missing fields: {', '.join(missing)}", line)
        unknown = set(fields) - set(self.REQUIRED_FIELDS) - set(self.OPTIONAL_FIELDS)
        if unknown:
            raise self.error(f"Unknown fields: {', '.join(sorted(unknown))}", line)
        try:
            level_index(fields['level'])
        except DoctrineError as e:
            raise self.error(str(e), line) from None
        if fields['type'] not in FUSION_CONFIG['unit_types']:
            raise self.error(
                f"Unknown type '{fields['type']}'. "
                f"Available: {', '.join(FUSION_CONFIG['unit_types'])}",
                line
            )
        for key in ('id', 'axis'):
            if fields[key] in ('', '-') or set(fields[key]) & set(',='):
                raise self.error(f"Invalid {key} '{fields[key]}'", line)
        start, end = self._time(fields['t'], line)
        confidence: Optional[Weight] = None
        if 'conf' in fields:
            try:
                confidence = Weight(fields['conf'])
            except WeightError as e:
                raise self.error(str(e), line) from None
        return Unit.observation(
            fields['id'], fields['level'], fields['type'], fields['axis'], start, end, confidence
        )

    def parse(self) -> Dict[str, Any]:
        """Parse scenario messages.

        Returns:
            Dictionary with 'metadata' and 'data' (a :class:`Scenario`).

        Raises:
            FileFormatError: On malformed lines, with the line number.
        """
        if not self.is_loaded:
            self.load()

        name = self.file_path.stem if self.file_path else 'scenario'
        observations = []
        self._lines: Dict[str, int] = {}
        for line, text in self._body_lines():
            keyword, _, rest = text.partition(' ')
            if keyword == 'name':
                name = rest.strip() or name
                continue
            if keyword != 'obs':
                raise self.error(f"Unknown record '{keyword}'", line)
            unit = self._observation(self._split_fields(rest, line), line)
            if unit.id in self._lines:
                raise self.invalid(
                    f"Duplicate observation id '{unit.id}' (first on line {self._lines[unit.id]})",
                    line
                )
            self._lines[unit.id] = line
            observations.append(unit)

        self._data = Scenario(name, tuple(observations))
        self.metadata.update({
            'data_type': 'scenario',
            'name': name,
            'observation_count': len(observations),
            'levels': self._data.levels(),
            'axes': sorted({a for u in observations for a in u.axes}),
        })
        self._is_parsed = True
        self.logger.info(f"Parsed {len(observations)} observations from {self.source}")
        return {'metadata': self.metadata, 'data': self.data}

    def validate(self, data: Optional[Scenario] = None) -> bool:
        """Validate the scenario.

        Raises:
            ValidationError: If an observation id clashes with the id
                scheme of aggregated units.
        """
        if data is None:
            data = self.data
        if data is None:
            raise self.invalid("No data to validate")
        prefixes = tuple(f"{p}-" for p in FUSION_CONFIG['level_prefixes'].values())
        for unit in data.observations:
            if unit.id.startswith(prefixes):
                raise self.invalid(
                    f"Observation id '{unit.id}' uses a reserved aggregate prefix",
                    getattr(self, '_lines', {}).get(unit.id)
                )
        self._is_validated = True
        return True
