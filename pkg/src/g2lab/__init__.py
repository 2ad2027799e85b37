"""Numerical laboratory for octonion algebra, G2-structures on R^7,
affine connections with torsion, and geodesic loops."""

__version__ = "0.1.0"
