"""Exact-arithmetic topological recursion and symplectic duality on genus-zero
spectral curves."""

__version__ = "0.1.0"
