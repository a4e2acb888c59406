"""Exact-arithmetic toolkit for map enumeration, genus expansions and
geodesic statistics of random planar maps."""

__version__ = "0.1.0"
