"""Generalized exp(-Phi)-expansion toolkit for fractional evolution equations."""

__version__ = "0.1.0"
