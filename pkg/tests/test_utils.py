"""Tests for utility helpers."""

import logging

import pytest

from src.core.weights import Weight
from src.utils.file_io import list_files_in_directory, read_text_file, write_text_file
from src.utils.formatting import format_ids, format_interval, format_minutes, format_weights
from src.utils.logger import get_logger, set_log_level, setup_logger


@pytest.mark.parametrize('minutes,text', [(0, '00:00'), (65, '01:05'), (600, '10:00')])
def test_format_minutes(minutes, text):
    assert format_minutes(minutes) == text


def test_format_minutes_rejects_negative():
    with pytest.raises(ValueError):
        format_minutes(-1)


def test_format_interval():
    assert format_interval(20, 20) == '00:20'
    assert format_interval(0, 65) == '00:00-01:05'


def test_format_ids_and_weights():
    assert format_ids(['S2', 'S1']) == 'S1, S2'
    assert format_ids([]) == '-'
    assert format_ids([], empty='') == ''
    assert format_weights([Weight('0.9'), Weight('0.5')]) == '0.9000, 0.5000'
    assert format_weights([]) == '-'


def test_write_and_read(tmp_path):
    path = tmp_path / 'nested' / 'out.txt'
    write_text_file(path, 'a\nb\n')
    assert path.read_bytes() == b'a\nb\n'
    assert read_text_file(path) == 'a\nb\n'


def test_read_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_text_file(tmp_path / 'missing.txt')


def test_list_files_sorted(tmp_path):
    for name in ('b.scn', 'a.scn', 'c.rules'):
        (tmp_path / name).write_text('x', encoding='utf-8')
    (tmp_path / 'sub').mkdir()
    (tmp_path / 'sub' / 'd.scn').write_text('x', encoding='utf-8')
    assert [p.name for p in list_files_in_directory(tmp_path, '*.scn')] == ['a.scn', 'b.scn']
    assert [p.name for p in list_files_in_directory(tmp_path, '*.scn', recursive=True)] == \
        ['a.scn', 'b.scn', 'd.scn']
    with pytest.raises(FileNotFoundError):
        list_files_in_directory(tmp_path / 'nope')


def test_setup_logger(tmp_path):
    log_file = tmp_path / 'logs' / 'fusion.log'
    logger = setup_logger('tests.fusion', log_file=log_file, level=logging.INFO, console=False)
    logger.info('pipeline started')
    for handler in logger.handlers:
        handler.flush()
    assert 'pipeline started' in log_file.read_text(encoding='utf-8')
    assert len(logger.handlers) == 1
    set_log_level(logger, logging.WARNING)
    assert logger.level == logging.WARNING
    assert all(h.level == logging.WARNING for h in logger.handlers)
    assert get_logger('tests.fusion') is logger
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)
