"""Frequency-domain design and analysis of interferometric Purcell filters."""

__version__ = "0.1.0"
