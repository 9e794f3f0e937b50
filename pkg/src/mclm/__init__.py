"""Pseudospectral simulation of the modified Constantin-Lax-Majda family on the circle."""

__version__ = "0.1.0"
