"""Multi-indices, coordinate families and canonical polynomial expressions."""

from .bundle import BundleSpec, CoordId, FamilyRole, FieldFamily, with_duals
from .expr import Density, Expr, JetVariable
from .indices import (
    SymMultiIndex,
    binomial_C,
    canonicalize_antisym,
    enumerate_multiindices,
    multiindex_sum,
)
from .parser import ExpressionParser, ParseResult, format_expr, parse_expr
from .random_expr import ExprProfile, random_expr

__all__ = [
    "BundleSpec",
    "CoordId",
    "FamilyRole",
    "FieldFamily",
    "with_duals",
    "Density",
    "Expr",
    "JetVariable",
    "SymMultiIndex",
    "binomial_C",
    "canonicalize_antisym",
    "enumerate_multiindices",
    "multiindex_sum",
    "ExpressionParser",
    "ParseResult",
    "format_expr",
    "parse_expr",
    "ExprProfile",
    "random_expr",
]
