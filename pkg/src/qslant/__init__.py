"""Numerical checks for slant submanifolds of quaternionic space forms."""

__version__ = "0.1.0"
