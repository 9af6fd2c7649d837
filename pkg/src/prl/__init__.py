"""Geometry kernel and certification pipeline for spherical inversive-distance circle packings."""

__version__ = "0.1.0"
