"""Numerical laboratory for 1-D wave equations with localized, critically
decaying damping on the half line."""

__version__ = "0.1.0"
