"""Dispatcher module to route input files to the appropriate parser."""

from pathlib import Path
from typing import Union, Type
import logging

from .base_parser import BaseParser, ParserError
from ..config import INPUT_CONFIG
from ..parsers.scenario_parser import ScenarioParser
from ..parsers.doctrine_parser import DoctrineParser
from ..parsers.rule_parser import RuleParser
from ..parsers.report_parser import ReportParser


class Dispatcher:
    """Routes input files to the appropriate parser based on their kind.

    The Dispatcher acts as a factory for creating parser instances based on
    either an explicit kind or automatic file extension detection.

    Example:
        >>> dispatcher = Dispatcher()
        >>> parser = dispatcher.get_parser('scenario', 'four_sections.scn')
        >>> parser.process()

        >>> # Auto-detect kind
        >>> kind = dispatcher.detect_kind('doctrine.yaml')
        >>> parser = dispatcher.get_parser(kind, 'doctrine.yaml')
    """

    def __init__(self):
        """Initialize the dispatcher with parser mappings."""
        self.logger = logging.getLogger(__name__)
        self._parser_map = {
            'scenario': ScenarioParser,
            'doctrine': DoctrineParser,
            'rules': RuleParser,
            'report': ReportParser,
        }

    def get_parser(
        self,
        kind: str,
        file_path: Union[str, Path] = None,
        **kwargs
    ) -> Union[BaseParser, Type[BaseParser]]:
        """Get appropriate parser for an input kind.

        Args:
            kind: Input kind ('scenario', 'doctrine', 'rules', 'report').
            file_path: Optional path to the input file.
            **kwargs: Additional arguments passed to parser constructor.

        Returns:
            Parser instance if file_path is provided, otherwise parser class.

        Raises:
            ParserError: If kind is unknown.
            FileNotFoundError: If file_path does not exist.
        """
        kind_lower = kind.lower()

        if kind_lower not in self._parser_map:
            available = ', '.join(self._parser_map.keys())
            raise ParserError(
                f"Unknown input kind: '{kind}'. "
                f"Available kinds: {available}"
            )

        parser_class = self._parser_map[kind_lower]

        if file_path:
            self.logger.info(f"Creating {kind} parser for {file_path}")
            return parser_class(file_path, **kwargs)

        return parser_class

    def detect_kind(self, file_path: Union[str, Path]) -> str:
        """Auto-detect the input kind from the file extension.

        Args:
            file_path: Path to the input file.

        Returns:
            Detected kind.

        Raises:
            ParserError: If the extension belongs to no known kind.

        Example:
            >>> Dispatcher().detect_kind('run.rpt')
            'report'
        """
        ext = Path(file_path).suffix.lower()

        for kind, config in INPUT_CONFIG.items():
            if kind in self._parser_map and ext in config['supported_extensions']:
                self.logger.info(f"Detected input kind '{kind}' from extension '{ext}'")
                return kind

        supported = sorted(
            e for kind, c in INPUT_CONFIG.items() if kind in self._parser_map
            for e in c['supported_extensions']
        )
        raise ParserError(
            f"Cannot detect input kind from extension: '{ext}'. "
            f"Supported extensions: {', '.join(supported)}"
        )

    def parse(self, file_path: Union[str, Path], kind: str = None, **kwargs):
        """Parse and validate a file, detecting its kind when not given.

        Returns:
            The parsed object (scenario, doctrine, rulebase or report).
        """
        parser = self.get_parser(kind or self.detect_kind(file_path), file_path, **kwargs)
        return parser.process()['data']

    def get_supported_kinds(self) -> list:
        """Get list of supported input kinds."""
        return list(self._parser_map.keys())

    def register_parser(self, kind: str, parser_class: Type[BaseParser]) -> None:
        """Register a new parser kind.

        Args:
            kind: Name for the input kind.
            parser_class: Parser class (must inherit from BaseParser).

        Raises:
            TypeError: If parser_class doesn't inherit from BaseParser.
        """
        if not issubclass(parser_class, BaseParser):
            raise TypeError(
                f"Parser class must inherit from BaseParser, "
                f"got {parser_class.__name__}"
            )

        self._parser_map[kind.lower()] = parser_class
        self.logger.info(f"Registered parser '{parser_class.__name__}' for kind '{kind}'")
