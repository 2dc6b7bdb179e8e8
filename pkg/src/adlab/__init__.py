"""Exact-arithmetic laboratory for rational self-maps of projective space."""

__version__ = "0.1.0"
