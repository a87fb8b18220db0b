"""Erasure-cost brackets from compression, and counting bounds for
reversible conservative circuits."""

__version__ = "0.1.0"
