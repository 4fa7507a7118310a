"""Parser for doctrine template files (YAML)."""

from typing import Any, Dict, List, Optional

import yaml

from ..core.base_parser import BaseParser
from ..core.units import Doctrine, DoctrineError, Requirement, Template
from ..core.weights import Weight, WeightError


class DoctrineParser(BaseParser):
    """Parser for YAML doctrine files.

    Format::

        format: doctrine/1
        epsilon: 0.05                 # optional
        templates:
          - name: tank_company
            level: company
            type: tank
            requires:
              - {type: tank, count: 3}
            max_span: 60
            max_axes: 1
            base_weight: 0.9

    Sub-units are always one level below the template level.

    Example:
        >>> doctrine = DoctrineParser('data/doctrine.yaml').process()['data']
    """

    kind = 'doctrine'

    TEMPLATE_FIELDS = ('name', 'level', 'type', 'requires', 'max_span', 'max_axes', 'base_weight')

    def _template_lines(self) -> List[Optional[int]]:
        """1-based start line of each template entry."""
        try:
            root = yaml.compose(self.raw_data)
        except yaml.YAMLError:
            return []
        if not isinstance(root, yaml.MappingNode):
            return []
        for key, value in root.value:
            if key.value == 'templates' and isinstance(value, yaml.SequenceNode):
                return [item.start_mark.line + 1 for item in value.value]
        return []

    def _weight(self, value: Any, what: str, line: Optional[int]) -> Weight:
        try:
            return Weight(str(value))
        except WeightError as e:
            raise self.error(f"{what}: {e}", line) from None

    def _integer(self, value: Any, what: str, line: Optional[int]) -> int:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(f"Invalid {what} '{value}': expected an integer", line)
        if isinstance(value, float) and not value.is_integer():
            raise self.error(f"Invalid {what} '{value}': expected an integer", line)
        return int(value)

    def _template(self, entry: Any, line: Optional[int]) -> Template:
        if not isinstance(entry, dict):
            raise self.error("Template entries must be mappings", line)
        missing = [f for f in self.TEMPLATE_FIELDS if f not in entry]
        if missing:
            raise self.error(f"Template is missing: {', '.join(missing)}", line)
        name = str(entry['name'])
        if name in ('', '-') or set(name) & set(', =\t'):
            raise self.error(f"Invalid template name '{name}'", line)
        requires = entry['requires']
        if not isinstance(requires, list) or not requires:
            raise self.error(f"Template '{name}': 'requires' must be a non-empty list", line)
        requirements = []
        for item in requires:
            if not isinstance(item, dict) or set(item) != {'type', 'count'}:
                raise self.error(
                    f"Template '{name}': requirements need exactly 'type' and 'count'", line
                )
            count = self._integer(item['count'], f"count in template '{name}'", line)
            requirements.append(Requirement(str(item['type']), count))
        try:
            return Template(
                name=name,
                level=str(entry['level']),
                type=str(entry['type']),
                requires=tuple(requirements),
                max_span=self._integer(entry['max_span'], f"max_span in template '{name}'", line),
                max_axes=self._integer(entry['max_axes'], f"max_axes in template '{name}'", line),
                base_weight=self._weight(entry['base_weight'], f"Template '{name}'", line),
            )
        except (TypeError, ValueError) as e:
            raise self.error(f"Template '{name}': {e}", line) from None

    def parse(self) -> Dict[str, Any]:
        """Parse the doctrine.

        Returns:
            Dictionary with 'metadata' and 'data' (a :class:`Doctrine`).

        Raises:
            FileFormatError: On YAML errors or malformed templates.
        """
        if not self.is_loaded:
            self.load()

        try:
            document = yaml.safe_load(self.raw_data)
        except yaml.YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            raise self.error(f"Invalid YAML: {getattr(e, 'problem', e)}",
                             mark.line + 1 if mark else None) from None

        if not isinstance(document, dict) or document.get('format') != self._config['header']:
            raise self.error(f"Expected 'format: {self._config['header']}'", 1)
        entries = document.get('templates')
        if not isinstance(entries, list):
            raise self.error("Expected a 'templates' list")

        lines = self._template_lines()
        templates = [
            self._template(entry, lines[i] if i < len(lines) else None)
            for i, entry in enumerate(entries)
        ]
        epsilon = None
        if 'epsilon' in document:
            epsilon = self._weight(document['epsilon'], 'epsilon', None)

        self._data = self._build(templates, epsilon, lines)

        self.metadata.update({
            'data_type': 'doctrine',
            'template_count': len(templates),
            'levels': sorted({t.level for t in templates}),
        })
        self._is_parsed = True
        self.logger.info(f"Parsed {len(templates)} templates from {self.source}")
        return {'metadata': self.metadata, 'data': self.data}

    def _build(self, templates: List[Template], epsilon: Optional[Weight], lines: List[int]) -> Doctrine:
        try:
            return Doctrine(templates, epsilon, self.source)
        except DoctrineError as e:
            line = None
            for template, number in zip(templates, lines):
                if f"'{template.name}'" in str(e):
                    line = number
                    break
            raise self.invalid(str(e).replace(f"{self.source}: ", ''), line) from None

    def validate(self, data: Optional[Doctrine] = None) -> bool:
        """Validate the doctrine (checked on construction).

        Raises:
            ValidationError: If no doctrine was parsed.
        """
        if data is None:
            data = self.data
        if data is None or not len(data):
            raise self.invalid("Doctrine defines no templates")
        self._is_validated = True
        return True
