"""Anchor-free topic mining from word co-occurrence matrices."""

__version__ = "0.1.0"
