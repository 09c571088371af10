"""Exact polynomial arithmetic and linear algebra over Q."""

from .linalg import (
    LinearSubspace,
    QMatrix,
    evaluate_matrix,
    fraction_free_echelon,
    kernel_basis,
    primitive_vector,
    rref,
    symbolic_kernel,
    symbolic_rank,
)
from .polynomial import MultiPoly, default_names, format_rational, phase_names, poly_diff, poly_eval, poly_gcd
from .ratfunc import RatFunc

__all__ = [
    "LinearSubspace",
    "MultiPoly",
    "QMatrix",
    "RatFunc",
    "default_names",
    "evaluate_matrix",
    "format_rational",
    "fraction_free_echelon",
    "kernel_basis",
    "phase_names",
    "poly_diff",
    "poly_eval",
    "poly_gcd",
    "primitive_vector",
    "rref",
    "symbolic_kernel",
    "symbolic_rank",
]
