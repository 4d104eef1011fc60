"""Exact toolkit for self-avoiding walks on the hexagonal lattice mid-edge graph."""

__version__ = "0.1.0"
