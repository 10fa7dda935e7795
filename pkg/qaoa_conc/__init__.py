"""QAOA MaxCut simulation and instance-concentration experiments."""

__version__ = '0.1.0'
