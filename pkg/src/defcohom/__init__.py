"""Exact deformation cohomology of Lie algebroids and double-bundle models at desk scale."""

__version__ = "0.1.0"
