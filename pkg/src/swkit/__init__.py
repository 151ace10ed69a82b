"""Executable SW-categories, the S-dot construction, K_0 and the additivity homotopy."""

__version__ = "0.1.0"
