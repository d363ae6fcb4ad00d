"""Blowup thresholds, variational constants and spectral simulation for the periodic rod equation."""

__version__ = "0.1.0"
