"""Tests for the input dispatcher."""

import pytest

from src.config import DEFAULT_DOCTRINE_PATH, RULES_DIR
from src.core.base_parser import BaseParser, ParserError
from src.core.dispatcher import Dispatcher
from src.parsers.report_parser import ReportParser
from src.parsers.scenario_parser import ScenarioParser


@pytest.mark.parametrize('name,kind', [
    ('four_sections.scn', 'scenario'),
    ('doctrine.yaml', 'doctrine'),
    ('doctrine.YML', 'doctrine'),
    ('companies.rules', 'rules'),
    ('run.rpt', 'report'),
])
def test_detect_kind(name, kind):
    assert Dispatcher().detect_kind(name) == kind


def test_detect_unknown_extension():
    with pytest.raises(ParserError) as info:
        Dispatcher().detect_kind('readings.csv')
    assert '.scn' in str(info.value)


def test_get_parser_class_and_instance(scenario_path):
    dispatcher = Dispatcher()
    assert dispatcher.get_parser('report') is ReportParser
    parser = dispatcher.get_parser('Scenario', scenario_path)
    assert isinstance(parser, ScenarioParser)
    assert not parser.is_parsed


def test_unknown_kind():
    with pytest.raises(ParserError):
        Dispatcher().get_parser('telemetry')


def test_parse_detects_kind(scenario_path):
    dispatcher = Dispatcher()
    assert len(dispatcher.parse(scenario_path)) == 4
    assert len(dispatcher.parse(DEFAULT_DOCTRINE_PATH)) == 6
    assert len(dispatcher.parse(RULES_DIR / 'companies.rules').rules) == 2


def test_register_parser():
    class NotesParser(BaseParser):
        kind = 'scenario'

        def parse(self):
            self._data = self.raw_data.splitlines()
            return {'metadata': self.metadata, 'data': self.data}

        def validate(self, data=None):
            return True

    dispatcher = Dispatcher()
    dispatcher.register_parser('notes', NotesParser)
    assert 'notes' in dispatcher.get_supported_kinds()
    assert dispatcher.get_parser('notes') is NotesParser


def test_register_rejects_non_parsers():
    with pytest.raises(TypeError):
        Dispatcher().register_parser('bad', dict)
