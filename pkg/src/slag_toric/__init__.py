"""Toric special Lagrangian fibration toolkit."""

__version__ = "0.1.0"
