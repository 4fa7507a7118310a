"""Tests for base_parser module."""

import pytest
from src.core.base_parser import BaseParser, FileFormatError, ParserError, ValidationError


class LineParser(BaseParser):
    """Minimal parser over the scenario header, one key=value record per line."""

    kind = 'scenario'

    def parse(self):
        if not self.is_loaded:
            self.load()
        self._data = [self._split_fields(text, line) for line, text in self._body_lines()]
        self._is_parsed = True
        return {'metadata': self.metadata, 'data': self.data}

    def validate(self, data=None):
        self._is_validated = True
        return True


def test_base_parser_cannot_instantiate():
    """Test that BaseParser cannot be instantiated directly."""
    with pytest.raises(TypeError):
        # BaseParser is abstract and cannot be instantiated
        BaseParser(text='format scenario/1\n')


def test_base_parser_requires_abstract_methods():
    """Test that subclasses must implement abstract methods."""

    class IncompleteParser(BaseParser):
        """Parser missing required abstract methods."""
        kind = 'scenario'

    # Should raise TypeError because abstract methods are not implemented
    with pytest.raises(TypeError):
        IncompleteParser(text='format scenario/1\n')


def test_parser_error_exception():
    """Test ParserError exception."""
    error = ParserError("Test error message")
    assert str(error) == "Test error message"
    assert isinstance(error, Exception)


def test_parser_error_location():
    """Errors render as path:line: message."""
    assert str(ParserError("bad", 'a.scn', 4)) == 'a.scn:4: bad'
    assert str(ParserError("bad", 'a.scn')) == 'a.scn: bad'
    assert issubclass(ValidationError, ParserError)
    assert issubclass(FileFormatError, ParserError)


def test_parser_needs_a_source():
    with pytest.raises(ParserError):
        LineParser()


def test_parse_text():
    parser = LineParser(text='# notes\nformat   scenario/1\na=1 b=2\n\nc=3  # trailing\n')
    result = parser.process()
    assert result['data'] == [{'a': '1', 'b': '2'}, {'c': '3'}]
    assert result['metadata']['file_name'] == '<text>'
    assert parser.is_parsed and parser.is_validated


def test_parse_file(tmp_path):
    path = tmp_path / 'notes.scn'
    path.write_text('format scenario/1\nx=y\n', encoding='utf-8')
    parser = LineParser(path)
    assert not parser.is_loaded
    assert parser.process()['data'] == [{'x': 'y'}]
    assert parser.metadata['size_bytes'] == len('format scenario/1\nx=y\n')
    assert 'notes.scn' in repr(parser)


def test_header_is_required():
    with pytest.raises(FileFormatError) as info:
        LineParser(text='\n\nformat rules/1\n').process()
    assert info.value.line == 3


def test_empty_text_has_no_header():
    with pytest.raises(FileFormatError) as info:
        LineParser(text='').process()
    assert info.value.line == 1


@pytest.mark.parametrize('record', ['novalue', '=1', 'a=1 a=2'])
def test_bad_fields(record):
    with pytest.raises(FileFormatError) as info:
        LineParser(text=f"format scenario/1\n{record}\n").process()
    assert info.value.line == 2
    assert str(info.value).startswith('<text>:2:')


def test_directory_is_not_a_file(tmp_path):
    with pytest.raises(ParserError):
        LineParser(tmp_path)


def test_undecodable_file(tmp_path):
    path = tmp_path / 'latin.scn'
    path.write_bytes('format scenario/1\nname=caf\xe9\n'.encode('latin-1'))
    with pytest.raises(ParserError):
        LineParser(path).process()
