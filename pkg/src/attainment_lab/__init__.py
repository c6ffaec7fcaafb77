"""Robust SOC reformulation and attainment diagnostics for conic programs."""

__version__ = "0.1.0"
