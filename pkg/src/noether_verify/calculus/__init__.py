"""Variational calculus on jet variables and linear differential operators."""

from .operators import (
    LinearDiffOp,
    OperatorRole,
    adjoint_by_parts,
    adjoint_eta,
    apply_to_section,
    collect_linear,
    compose,
    op_equal,
    pairing_defect,
)
from .variational import (
    CurrentVector,
    GeneralizedVectorField,
    euler_lagrange,
    first_variational_residual,
    is_variationally_trivial,
    iterated_total_derivative,
    lie_derive_density,
    noether_current,
    substitute_section,
    total_derivative,
)

__all__ = [
    "LinearDiffOp",
    "OperatorRole",
    "adjoint_by_parts",
    "adjoint_eta",
    "apply_to_section",
    "collect_linear",
    "compose",
    "op_equal",
    "pairing_defect",
    "CurrentVector",
    "GeneralizedVectorField",
    "euler_lagrange",
    "first_variational_residual",
    "is_variationally_trivial",
    "iterated_total_derivative",
    "lie_derive_density",
    "noether_current",
    "substitute_section",
    "total_derivative",
]
