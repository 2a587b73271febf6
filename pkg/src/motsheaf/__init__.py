"""Effective motivic sheaves over finite simplicial bases, computed exactly."""

__version__ = "0.1.0"
