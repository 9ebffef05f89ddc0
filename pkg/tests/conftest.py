"""Shared fixtures for noether-verify tests."""

import pytest
import sympy

from noether_verify.algebra.bundle import BundleSpec, CoordId, FamilyRole, FieldFamily, with_duals
from noether_verify.algebra.expr import Density, Expr
from noether_verify.algebra.parser import format_variable, parse_expr
from noether_verify.calculus.operators import LinearDiffOp
from noether_verify.models.base import Model
from noether_verify.models.bf import build_bf
from noether_verify.models.chern_simons import build_chern_simons


@pytest.fixture(scope="session")
def line_spec():
    """One base dimension, scalar field y, scalar parameter xi, with duals."""
    families = [FieldFamily("y", FamilyRole.FIELD), FieldFamily("xi", FamilyRole.PARAMETER)]
    return BundleSpec(1, tuple(with_duals(families)))


@pytest.fixture(scope="session")
def plane_spec():
    """Two base dimensions with scalar and vector fields and parameters."""
    families = [
        FieldFamily("y", FamilyRole.FIELD),
        FieldFamily("u", FamilyRole.FIELD, (2,)),
        FieldFamily("xi", FamilyRole.PARAMETER),
        FieldFamily("p", FamilyRole.PARAMETER, (2,)),
    ]
    return BundleSpec(2, tuple(with_duals(families)))


@pytest.fixture(scope="session")
def antisym_spec():
    """Three base dimensions and an antisymmetric field a[i,j]."""
    return BundleSpec(3, (FieldFamily("a", FamilyRole.FIELD, (3, 3), antisym=True),))


@pytest.fixture(scope="session")
def to_sympy():
    """Converter from Expr to an expanded sympy polynomial, one symbol per jet variable."""

    def convert(expr: Expr) -> sympy.Expr:
        total = sympy.Integer(0)
        for mono, coeff in expr.terms.items():
            term = sympy.Rational(coeff.numerator, coeff.denominator)
            for var, exp in mono:
                term *= sympy.Symbol(format_variable(var)) ** exp
            total += term
        return sympy.expand(total)

    return convert


@pytest.fixture(scope="session")
def cs_model():
    return build_chern_simons()


@pytest.fixture(scope="session")
def bf_311():
    return build_bf(3, 1, 1)


@pytest.fixture(scope="session")
def bf_522():
    return build_bf(5, 2, 2)


@pytest.fixture(scope="session")
def stueckelberg():
    """1/2 (y_0 - z)^2 with the gauge symmetry y -> y + xi, z -> z + d_0 xi."""
    families = [
        FieldFamily("y", FamilyRole.FIELD),
        FieldFamily("z", FamilyRole.FIELD),
        FieldFamily("xi", FamilyRole.PARAMETER),
    ]
    spec = BundleSpec(1, tuple(with_duals(families)))
    y, z, xi = CoordId("y", ()), CoordId("z", ()), CoordId("xi", ())
    one = Expr.constant(spec, 1)
    upsilon = LinearDiffOp(spec, ("xi",), ("y", "z"), {(y, xi, ()): one, (z, xi, (0,)): one})
    lagrangian = Density(parse_expr(spec, "1/2*y[;(0)]^2 - y[;(0)]*z + 1/2*z^2"))
    return Model(name="stueckelberg", spec=spec, lagrangian=lagrangian, gauge_symmetry=upsilon)
