"""Configuration module for possibilistic-fusion.

This module contains all configuration settings for the application,
including paths, logging configuration, engine limits, fusion defaults and
report settings.
"""

from pathlib import Path
from decimal import Decimal
from typing import Dict, Any


# Base directories
BASE_DIR = Path(__file__).parent.parent.resolve()
DATA_DIR = BASE_DIR / 'data'
SCENARIO_DIR = DATA_DIR / 'scenarios'
RULES_DIR = DATA_DIR / 'rules'
LOGS_DIR = BASE_DIR / 'logs'
TESTS_DIR = BASE_DIR / 'tests'

DEFAULT_DOCTRINE_PATH = DATA_DIR / 'doctrine.yaml'


# Logging configuration
LOGGING_CONFIG = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'standard': {
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            'datefmt': '%Y-%m-%d %H:%M:%S'
        },
        'detailed': {
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s',
            'datefmt': '%Y-%m-%d %H:%M:%S'
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'level': 'WARNING',
            'formatter': 'standard',
            # reports go to stdout
            'stream': 'ext://sys.stderr',
        },
        'file': {
            'class': 'logging.FileHandler',
            'level': 'DEBUG',
            'formatter': 'detailed',
            'filename': str(LOGS_DIR / 'possibilistic_fusion.log'),
            'mode': 'a',
            'delay': True,
        },
    },
    'loggers': {
        '': {  # Root logger
            'level': 'DEBUG',
            'handlers': ['console', 'file'],
        },
    },
}


# Truth maintenance and rule engine limits
ENGINE_CONFIG = {
    'weight_scale': 4,
    'oracle_max_propositions': 20,
    'interpretation_cap': 24,
    'max_firings': 100000,
}


# Fusion pipeline defaults
FUSION_CONFIG = {
    'k': 3,
    'm': 3,
    'epsilon': Decimal('0.05'),
    'default_confidence': Decimal('1.0'),
    'conflict_weight': Decimal('1.0'),
    'parallel': False,
    'max_workers': 4,
    'levels': ['section', 'company', 'battalion', 'regiment', 'division'],
    'unit_types': ['tank', 'motorised_rifle', 'combined_arms'],
    'level_prefixes': {
        'section': 'SEC',
        'company': 'COY',
        'battalion': 'BN',
        'regiment': 'RGT',
        'division': 'DIV',
    },
}


# Input formats: header line written as the first non-comment line
INPUT_CONFIG = {
    'scenario': {
        'supported_extensions': ['.scn', '.txt'],
        'header': 'format scenario/1',
        'encoding': 'utf-8',
    },
    'doctrine': {
        'supported_extensions': ['.yaml', '.yml'],
        'header': 'doctrine/1',
        'encoding': 'utf-8',
    },
    'rules': {
        'supported_extensions': ['.rules'],
        'header': 'format rules/1',
        'encoding': 'utf-8',
    },
    'report': {
        'supported_extensions': ['.rpt', '.report'],
        'header': 'format report/1',
        'encoding': 'utf-8',
    },
}


# Output configuration
OUTPUT_CONFIG = {
    'formats': ['text', 'structured'],
    'default_format': 'text',
    'encoding': 'utf-8',
    'time_format': 'HH:MM',
}


# Application configuration
APP_CONFIG = {
    'name': 'possibilistic-fusion',
    'version': '0.1.0',
    'description': 'Possibilistic truth maintenance for hierarchical unit aggregation',
    'author': 'possibilistic-fusion contributors',
    'default_encoding': 'utf-8',
    'verbose': False,
}


def get_input_config(kind: str) -> Dict[str, Any]:
    """Get configuration for an input file kind.

    Args:
        kind: One of the keys of ``INPUT_CONFIG``.

    Returns:
        Configuration dictionary for the input kind.

    Raises:
        ValueError: If kind is not recognized.
    """
    if kind not in INPUT_CONFIG:
        raise ValueError(
            f"Unknown input kind: {kind}. "
            f"Available: {list(INPUT_CONFIG.keys())}"
        )
    return INPUT_CONFIG[kind]


def get_engine_config(**overrides: Any) -> Dict[str, Any]:
    """Get engine limits, optionally overriding some of them.

    Args:
        **overrides: Keys of ``ENGINE_CONFIG`` to replace.

    Returns:
        A copy of ``ENGINE_CONFIG`` with the overrides applied.

    Raises:
        ValueError: If an override names an unknown setting.
    """
    unknown = set(overrides) - set(ENGINE_CONFIG)
    if unknown:
        raise ValueError(f"Unknown engine settings: {sorted(unknown)}")
    config = dict(ENGINE_CONFIG)
    config.update(overrides)
    return config


def setup_logging(verbose: bool = False) -> None:
    """Set up logging configuration.

    Args:
        verbose: If True, set console handler to DEBUG level.
    """
    import copy
    import logging.config

    # Ensure logs directory exists
    LOGS_DIR.mkdir(parents=True, exist_ok=True)

    config = copy.deepcopy(LOGGING_CONFIG)

    if verbose:
        config['handlers']['console']['level'] = 'DEBUG'

    logging.config.dictConfig(config)


def validate_config() -> bool:
    """Validate configuration settings.

    Returns:
        True if configuration is valid.

    Raises:
        ValueError: If configuration is invalid.
    """
    for key in ('oracle_max_propositions', 'interpretation_cap', 'max_firings'):
        if ENGINE_CONFIG[key] < 1:
            raise ValueError(f"ENGINE_CONFIG['{key}'] must be positive")

    if FUSION_CONFIG['k'] < 1 or FUSION_CONFIG['m'] < 1:
        raise ValueError("FUSION_CONFIG k and m must be at least 1")

    if not (0 < FUSION_CONFIG['epsilon'] <= 1):
        raise ValueError("FUSION_CONFIG['epsilon'] must lie in (0, 1]")

    missing = set(FUSION_CONFIG['levels']) - set(FUSION_CONFIG['level_prefixes'])
    if missing:
        raise ValueError(f"Levels without an id prefix: {sorted(missing)}")

    for kind, config in INPUT_CONFIG.items():
        if 'supported_extensions' not in config:
            raise ValueError(
                f"Input config for '{kind}' missing 'supported_extensions'"
            )
        if 'header' not in config:
            raise ValueError(
                f"Input config for '{kind}' missing 'header'"
            )

    return True


# Validate configuration on import
validate_config()
