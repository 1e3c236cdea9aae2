"""Mahler systems: rational functions, parsing, univariate and multivariate systems."""

from .multi import (
    DependentExponents,
    MultiMahlerSystem,
    RadixMismatch,
    build_block_system,
    expand_block,
    fiber_decompose,
    reconstruct,
    substitute_monomial,
)
from .parser import ParseError, parse_coefficient, parse_ratfunc
from .poly import MPoly, Poly, RatFunc
from .system import (
    InconsistentSeeds,
    InsufficientSeeds,
    MahlerError,
    MahlerSystem,
    SingularSystem,
    expand,
    iterate,
    residual,
    twist,
)

__all__ = [
    "DependentExponents", "InconsistentSeeds", "InsufficientSeeds", "MPoly", "MahlerError",
    "MahlerSystem", "MultiMahlerSystem", "ParseError", "Poly", "RadixMismatch", "RatFunc",
    "SingularSystem", "build_block_system", "expand", "expand_block", "fiber_decompose",
    "iterate", "parse_coefficient", "parse_ratfunc", "reconstruct", "residual",
    "substitute_monomial", "twist",
]
