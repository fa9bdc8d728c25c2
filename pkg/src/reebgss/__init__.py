"""Numerical laboratory for Reeb flows on contact open books."""

__version__ = "0.1.0"
