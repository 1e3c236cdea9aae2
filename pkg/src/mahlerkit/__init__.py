"""Exact toolkit for Mahler functions at multiplicatively dependent points."""

__version__ = "0.1.0"
