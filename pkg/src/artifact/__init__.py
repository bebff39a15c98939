"""Quantum authentication, key distribution, key agreement and DL04 game analysis."""

__version__ = "0.1.0"
