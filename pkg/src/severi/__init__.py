"""Exact computations with nodal curves on Hirzebruch surfaces."""

__version__ = "0.1.0"
