"""Exact toolkit for foliated surface singularities given by weighted dual graphs."""

__version__ = "0.1.0"
