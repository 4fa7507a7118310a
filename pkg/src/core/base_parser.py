"""Base parser module for fusion input files.

This module provides the abstract base class and error types shared by the
scenario, doctrine, rule and report parsers. All of them read small versioned
text documents whose first significant line (or key) names the format.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, Any, Optional, List, Union, Tuple
import logging
from datetime import datetime

from ..config import get_input_config


class ParserError(Exception):
    """Base exception for parser errors.

    Attributes:
        path: File the error was found in, if known.
        line: 1-based line number, if known.
    """

    def __init__(self, message: str, path: Optional[Union[str, Path]] = None, line: Optional[int] = None):
        self.message = message
        self.path = None if path is None else str(path)
        self.line = line
        super().__init__(self._render())

    def _render(self) -> str:
        if self.path and self.line:
            return f"{self.path}:{self.line}: {self.message}"
        if self.path:
            return f"{self.path}: {self.message}"
        return self.message


class ValidationError(ParserError):
    """Exception raised when parsed content is inconsistent."""
    pass


class FileFormatError(ParserError):
    """Exception raised when file format is invalid."""
    pass


class BaseParser(ABC):
    """Abstract base class for all input parsers.

    Subclasses set ``kind`` to a key of ``INPUT_CONFIG`` and implement
    :meth:`parse` and :meth:`validate`. Text can come from a file or be given
    directly, which is how tests and the report round trip use parsers.

    Attributes:
        file_path (Path): Path to the input file, if any.
        metadata (dict): Metadata collected while parsing.
        data: Parsed object (scenario, doctrine, rulebase, report).
        raw_data (str): Raw file content before parsing.

    Example:
        >>> parser = ScenarioParser('data/scenarios/four_sections.scn')
        >>> result = parser.process()
        >>> result['data']
    """

    kind: str = ''

    def __init__(
        self,
        file_path: Optional[Union[str, Path]] = None,
        encoding: Optional[str] = None,
        text: Optional[str] = None,
        **kwargs
    ):
        """Initialize the parser.

        Args:
            file_path: Path to the file to parse.
            encoding: File encoding (default from ``INPUT_CONFIG``).
            text: Content to parse instead of reading ``file_path``.
            **kwargs: Additional parser-specific parameters.

        Raises:
            FileNotFoundError: If the file does not exist.
            ParserError: If neither a path nor text is given.
        """
        if file_path is None and text is None:
            raise ParserError("Either a file path or text is required")
        config = get_input_config(self.kind)
        self._config = config
        self._file_path = None if file_path is None else Path(file_path)
        self._encoding = encoding or config['encoding']
        self._metadata: Dict[str, Any] = {
            'file_name': self._file_path.name if self._file_path else '<text>',
            'file_path': str(self._file_path) if self._file_path else '<text>',
            'created_at': datetime.now().isoformat(),
        }
        self._data: Any = None
        self._raw_data: Optional[str] = text
        self._is_loaded = text is not None
        self._is_parsed = False
        self._is_validated = False
        self._extra_params = kwargs

        # Set up logger
        self.logger = logging.getLogger(self.__class__.__name__)

        if self._file_path is not None and text is None:
            self._validate_file_path()

    @property
    def file_path(self) -> Optional[Path]:
        """Get the file path."""
        return self._file_path

    @property
    def source(self) -> str:
        """Name used in diagnostics."""
        return str(self._file_path) if self._file_path else '<text>'

    @property
    def encoding(self) -> str:
        """Get the file encoding."""
        return self._encoding

    @property
    def metadata(self) -> Dict[str, Any]:
        """Get metadata dictionary."""
        return self._metadata

    @property
    def data(self) -> Any:
        """Get parsed data."""
        return self._data

    @property
    def raw_data(self) -> Optional[str]:
        """Get raw data."""
        return self._raw_data

    @property
    def is_loaded(self) -> bool:
        return self._is_loaded

    @property
    def is_parsed(self) -> bool:
        return self._is_parsed

    @property
    def is_validated(self) -> bool:
        return self._is_validated

    def _validate_file_path(self) -> None:
        """Validate that the file path exists and is readable.

        Raises:
            FileNotFoundError: If file does not exist.
            ParserError: If the path is not a regular file.
        """
        if not self._file_path.exists():
            raise FileNotFoundError(f"File not found: {self._file_path}")

        if not self._file_path.is_file():
            raise ParserError("Path is not a file", self._file_path)

        suffix = self._file_path.suffix.lower()
        if suffix not in self._config['supported_extensions']:
            self.logger.warning(
                f"Unexpected extension '{suffix}' for a {self.kind} file: {self._file_path}"
            )

    def error(self, message: str, line: Optional[int] = None) -> FileFormatError:
        """Build a format error located in this parser's source."""
        return FileFormatError(message, self.source, line)

    def invalid(self, message: str, line: Optional[int] = None) -> ValidationError:
        """Build a validation error located in this parser's source."""
        return ValidationError(message, self.source, line)

    def _significant_lines(self) -> List[Tuple[int, str]]:
        """Numbered lines with comments and blank lines removed."""
        lines = []
        for number, raw in enumerate(self.raw_data.splitlines(), start=1):
            text = raw.split('#', 1)[0].strip()
            if text:
                lines.append((number, text))
        return lines

    def _body_lines(self) -> List[Tuple[int, str]]:
        """Significant lines after the format header.

        Raises:
            FileFormatError: If the first significant line is not the header.
        """
        lines = self._significant_lines()
        header = self._config['header']
        if not lines or ' '.join(lines[0][1].split()) != header:
            line = lines[0][0] if lines else 1
            raise self.error(f"Expected header '{header}'", line)
        return lines[1:]

    def _split_fields(self, text: str, line: int) -> Dict[str, str]:
        """Parse ``key=value`` tokens.

        Raises:
            FileFormatError: On tokens without ``=`` or repeated keys.
        """
        fields: Dict[str, str] = {}
        for token in text.split():
            key, sep, value = token.partition('=')
            if not sep or not key:
                raise self.error(f"Expected key=value, got '{token}'", line)
            if key in fields:
                raise self.error(f"Repeated field '{key}'", line)
            fields[key] = value
        return fields

    def load(self) -> None:
        """Read the file into :attr:`raw_data`.

        Raises:
            ParserError: If the file cannot be decoded.
        """
        try:
            self._raw_data = self._file_path.read_text(encoding=self._encoding)
        except UnicodeDecodeError as e:
            raise ParserError(f"Cannot decode as {self._encoding}: {e}", self._file_path) from e
        self._metadata['size_bytes'] = len(self._raw_data.encode(self._encoding))
        self._is_loaded = True
        self.logger.debug(f"Loaded {self.source}")

    @abstractmethod
    def parse(self) -> Dict[str, Any]:
        """Parse the loaded text.

        Sets :attr:`data` and returns ``{'metadata': ..., 'data': ...}``.

        Raises:
            ParserError: If parsing fails.
        """
        pass

    @abstractmethod
    def validate(self, data: Any = None) -> bool:
        """Validate the parsed object.

        Args:
            data: Object to validate. If None, uses self.data.

        Returns:
            True if validation passes.

        Raises:
            ValidationError: If validation fails.
        """
        pass

    def process(self, skip_validation: bool = False) -> Dict[str, Any]:
        """Run the complete parsing pipeline.

        This is a convenience method that runs load(), parse(), and
        optionally validate() in sequence.

        Args:
            skip_validation: If True, skip the validation step.

        Returns:
            Dictionary containing 'metadata' and 'data' keys.

        Raises:
            ParserError: If any step fails.
        """
        self.logger.info(f"Processing {self.source}")

        if not self.is_loaded:
            self.load()

        if not self.is_parsed:
            result = self.parse()
        else:
            result = {'metadata': self.metadata, 'data': self.data}

        if not skip_validation and not self.is_validated:
            self.validate()

        self.logger.info(f"Successfully processed {self.source}")
        return result

    def __repr__(self) -> str:
        """String representation of parser."""
        return (
            f"{self.__class__.__name__}("
            f"source='{self.source}', "
            f"loaded={self.is_loaded}, "
            f"parsed={self.is_parsed}, "
            f"validated={self.is_validated})"
        )
