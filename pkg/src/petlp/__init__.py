"""Compliance-aware data pipeline toolkit for social media research."""

__version__ = "0.1.0"
