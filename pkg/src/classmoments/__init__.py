"""Moment exponents of ideal-class counting functions from Galois group data."""

__version__ = "0.1.0"
