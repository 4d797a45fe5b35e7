"""Stability complexes, central stability homology and polynomial degree for
stability categories over finite rings (FI, VIC(Z/m), VIC^H(Z/m), SI(Z/m))."""

__version__ = "0.1.0"
