"""Exact quantum order finding given a known multiple of the order, simulated."""

__version__ = "0.1.0"
