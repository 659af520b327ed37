"""Canonical forms, entropy-optimal sampling, and circuit reductions for Clifford operators."""

__version__ = "0.1.0"
