"""Exact toric K-equivalence toolkit."""

__version__ = "0.1.0"
