"""Tests for configuration helpers."""

import pytest

from src import config
from src.config import ENGINE_CONFIG, get_engine_config, get_input_config, validate_config


def test_validate_shipped_config():
    assert validate_config()


def test_engine_overrides_are_copies():
    settings = get_engine_config(interpretation_cap=3)
    assert settings['interpretation_cap'] == 3
    assert ENGINE_CONFIG['interpretation_cap'] == 24
    assert settings['max_firings'] == ENGINE_CONFIG['max_firings']


def test_unknown_engine_setting():
    with pytest.raises(ValueError):
        get_engine_config(rete=True)


def test_input_config():
    assert get_input_config('report')['header'] == 'format report/1'
    with pytest.raises(ValueError):
        get_input_config('segy')


def test_invalid_fusion_settings(monkeypatch):
    monkeypatch.setitem(config.FUSION_CONFIG, 'k', 0)
    with pytest.raises(ValueError):
        validate_config()


def test_invalid_engine_settings(monkeypatch):
    monkeypatch.setitem(config.ENGINE_CONFIG, 'max_firings', 0)
    with pytest.raises(ValueError):
        validate_config()


def test_level_without_prefix(monkeypatch):
    monkeypatch.setitem(config.FUSION_CONFIG, 'level_prefixes', {'section': 'SEC'})
    with pytest.raises(ValueError):
        validate_config()


def test_readme_is_utf8_for_setup():
    raw = (config.BASE_DIR / 'README.md').read_bytes()
    assert not raw.startswith((b'\xff\xfe', b'\xfe\xff', b'\xef\xbb\xbf'))
    assert raw.decode('utf-8').startswith('# Possibilistic-Fusion\n')
