"""Exact chain calculus on tagged simplicial complexes.

Builds simplicial chain algebra (subdivision, cap products, intersection
face maps), the admissible double complex with its cohomology, and the
analytic pairing of chains against logarithmic differential forms, up to
numerically verified special values of iterated integrals.
"""

from .errors import ChainCalcError

__all__ = ["ChainCalcError"]
__version__ = "0.1.0"
