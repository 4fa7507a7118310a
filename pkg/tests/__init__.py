"""Test suite for possibilistic-fusion."""

__version__ = '0.1.0'
