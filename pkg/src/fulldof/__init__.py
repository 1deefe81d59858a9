"""Exact checks of the full-DoF injectivity condition and a discrete-entropy toolkit."""

__version__ = "0.1.0"
