"""Exact equivariant quantum K-theory of Grassmannians via the five-vertex
lattice model: transfer matrices, Bethe vectors, localization, and products.
"""

__version__ = "0.1.0"
