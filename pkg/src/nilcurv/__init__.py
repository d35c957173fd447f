"""Curvature of metric nilpotent Lie algebras from structure constants."""

__version__ = "0.1.0"
