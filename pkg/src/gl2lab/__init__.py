"""Exact computations with subgroups of GL_2(Z/nZ)."""

from .mat2 import Mat2

__version__ = "0.1.0"
__all__ = ["Mat2"]
