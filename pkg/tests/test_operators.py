"""Tests for linear differential operators and the adjoint eta."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noether_verify.algebra.bundle import CoordId
from noether_verify.algebra.expr import Expr
from noether_verify.algebra.parser import parse_expr
from noether_verify.calculus.operators import (
    LinearDiffOp,
    OperatorRole,
    adjoint_by_parts,
    adjoint_eta,
    apply_to_section,
    collect_linear,
    compose,
    infer_role,
    op_equal,
    pairing_defect,
    symbolic_section,
)
from noether_verify.calculus.variational import is_variationally_trivial, variational_residual
from noether_verify.errors import BundleMismatchError, MissingComponentError, RoleError
from noether_verify.runner.properties import PropertyProfile, random_bundle, random_operator

Y, XI = CoordId("y", ()), CoordId("xi", ())
Y_BAR, XI_BAR = CoordId("y_bar", ()), CoordId("xi_bar", ())
PROFILE = PropertyProfile(max_order=2, max_degree=2, max_base_dim=2, max_terms=3)


@pytest.fixture(scope="module")
def first_order_gauge(line_spec):
    """upsilon(xi) = y^2 xi + x y d_0 xi."""
    return LinearDiffOp(
        line_spec,
        ("xi",),
        ("y",),
        {
            (Y, XI, ()): parse_expr(line_spec, "y^2"),
            (Y, XI, (0,)): parse_expr(line_spec, "x[0]*y"),
        },
    )


def test_role_inference(plane_spec):
    assert infer_role(plane_spec, ["xi", "p"], ["y", "u"]) is OperatorRole.GAUGE_SYMMETRY
    assert infer_role(plane_spec, ["y_bar"], ["xi_bar"]) is OperatorRole.NOETHER
    assert infer_role(plane_spec, ["xi"], ["p"]) is OperatorRole.CHAIN_STAGE
    assert infer_role(plane_spec, ["y"], ["xi"]) is OperatorRole.GENERIC


def test_adjoint_of_first_order_operator(line_spec, first_order_gauge):
    adjoint = adjoint_eta(first_order_gauge)
    assert adjoint.role is OperatorRole.NOETHER
    assert adjoint.source == ("y_bar",)
    assert adjoint.target == ("xi_bar",)
    assert adjoint.coeff(XI_BAR, Y_BAR) == parse_expr(line_spec, "y^2 - y - x[0]*y[;(0)]")
    assert adjoint.coeff(XI_BAR, Y_BAR, (0,)) == parse_expr(line_spec, "-x[0]*y")
    assert adjoint.order == 1


def test_adjoint_of_second_order_operator(line_spec):
    op = LinearDiffOp(line_spec, ("xi",), ("y",), {(Y, XI, (0, 0)): parse_expr(line_spec, "y")})
    adjoint = adjoint_eta(op)
    # d_00(y q) = y_00 q + 2 y_0 q_0 + y q_00
    assert adjoint.coeff(XI_BAR, Y_BAR) == parse_expr(line_spec, "y[;(0,0)]")
    assert adjoint.coeff(XI_BAR, Y_BAR, (0,)) == parse_expr(line_spec, "2*y[;(0)]")
    assert adjoint.coeff(XI_BAR, Y_BAR, (0, 0)) == parse_expr(line_spec, "y")


def test_adjoint_is_involutive(first_order_gauge):
    assert op_equal(adjoint_eta(adjoint_eta(first_order_gauge)), first_order_gauge)
    assert adjoint_eta(adjoint_eta(first_order_gauge)).role is OperatorRole.GAUGE_SYMMETRY


def test_adjoint_matches_integration_by_parts(first_order_gauge):
    assert op_equal(adjoint_eta(first_order_gauge), adjoint_by_parts(first_order_gauge))


def test_pairing_defect(first_order_gauge):
    assert is_variationally_trivial(pairing_defect(first_order_gauge))
    doubled = pairing_defect(first_order_gauge, lambda op: adjoint_eta(op).scale(2))
    assert variational_residual(doubled)


def test_identity_adjoint(plane_spec):
    identity = LinearDiffOp.identity(plane_spec, "xi", "y")
    assert identity.role is OperatorRole.GAUGE_SYMMETRY
    assert op_equal(adjoint_eta(identity), LinearDiffOp.identity(plane_spec, "y_bar", "xi_bar"))
    with pytest.raises(BundleMismatchError):
        LinearDiffOp.identity(plane_spec, "xi", "u")


def test_compose_total_derivatives(plane_spec):
    d0 = LinearDiffOp(plane_spec, ("xi",), ("xi",), {(XI, XI, (0,)): Expr.constant(plane_spec, 1)})
    d1 = LinearDiffOp(plane_spec, ("xi",), ("xi",), {(XI, XI, (1,)): Expr.constant(plane_spec, 1)})
    assert d0.role is OperatorRole.CHAIN_STAGE
    composite = compose(d0, d1)
    assert dict(composite.coeffs) == {(XI, XI, (0, 1)): Expr.constant(plane_spec, 1)}
    assert op_equal(composite, compose(d1, d0))


def test_compose_with_coefficients(line_spec):
    outer = LinearDiffOp(line_spec, ("xi",), ("y",), {(Y, XI, (0,)): parse_expr(line_spec, "x[0]")})
    inner = LinearDiffOp(line_spec, ("xi",), ("xi",), {(XI, XI, ()): parse_expr(line_spec, "y")})
    composite = compose(outer, inner)
    assert composite.coeff(Y, XI) == parse_expr(line_spec, "x[0]*y[;(0)]")
    assert composite.coeff(Y, XI, (0,)) == parse_expr(line_spec, "x[0]*y")
    with pytest.raises(BundleMismatchError):
        compose(inner, outer)


def test_apply_to_section(line_spec, first_order_gauge):
    images = apply_to_section(first_order_gauge, {XI: parse_expr(line_spec, "x[0]^2")})
    assert images == {Y: parse_expr(line_spec, "x[0]^2*y^2 + 2*x[0]^2*y")}
    with pytest.raises(MissingComponentError):
        apply_to_section(first_order_gauge, {})


def test_collect_linear(line_spec):
    section = symbolic_section(line_spec, ["xi"])
    assert section == {XI: parse_expr(line_spec, "xi")}
    collected = collect_linear(parse_expr(line_spec, "y*xi[;(0)] + 3*xi"), ["xi"])
    assert collected == {
        (XI, (0,)): parse_expr(line_spec, "y"),
        (XI, ()): Expr.constant(line_spec, 3),
    }
    with pytest.raises(ValueError):
        collect_linear(parse_expr(line_spec, "xi^2"), ["xi"])


def test_role_and_coefficient_validation(line_spec):
    with pytest.raises(RoleError):
        LinearDiffOp(line_spec, ("y",), ("xi",), role=OperatorRole.GAUGE_SYMMETRY)
    with pytest.raises(BundleMismatchError):
        LinearDiffOp(line_spec, ("xi",), ("y",), {(Y, XI, ()): parse_expr(line_spec, "xi")})
    with pytest.raises(BundleMismatchError):
        LinearDiffOp(line_spec, ("xi",), ("y",), {(XI, XI, ()): parse_expr(line_spec, "y")})
    with pytest.raises(BundleMismatchError):
        LinearDiffOp(line_spec, ("x",), ("y",))


def test_arithmetic(line_spec, first_order_gauge):
    assert (first_order_gauge - first_order_gauge).is_zero()
    assert op_equal(first_order_gauge + first_order_gauge, first_order_gauge.scale(2))
    assert op_equal(-first_order_gauge, first_order_gauge.scale(-1))
    other = LinearDiffOp(line_spec, ("xi",), ("xi",))
    with pytest.raises(BundleMismatchError):
        first_order_gauge + other


def test_restrict_target(plane_spec):
    op = LinearDiffOp(
        plane_spec,
        ("xi",),
        ("y", "u"),
        {
            (Y, XI, ()): Expr.constant(plane_spec, 1),
            (CoordId("u", (1,)), XI, (0,)): Expr.constant(plane_spec, 1),
        },
    )
    restricted = op.restrict_target(["u"])
    assert restricted.target == ("u",)
    assert list(restricted.coeffs) == [(CoordId("u", (1,)), XI, (0,))]


def test_document_roundtrip(antisym_spec):
    spec = antisym_spec
    op = LinearDiffOp(spec, ("a",), ("a",), {
        (CoordId("a", (0, 1)), CoordId("a", (1, 2)), (2,)): parse_expr(spec, "x[0]"),
    })
    again = LinearDiffOp.from_dict(op.to_dict())
    assert op_equal(again, op)
    assert again.role is OperatorRole.GENERIC


def test_document_resolves_antisymmetric_signs(antisym_spec):
    document = {
        "bundle": antisym_spec.to_dict(),
        "source": ["a"],
        "target": ["a"],
        "coeffs": [
            {"a": "a[1,0]", "r": "a[0,2]", "jet": [1], "expr": "x[2]"},
            {"a": "a[1,1]", "r": "a[0,2]", "jet": [], "expr": "1"},
        ],
    }
    op = LinearDiffOp.from_dict(document)
    assert dict(op.coeffs) == {
        (CoordId("a", (0, 1)), CoordId("a", (0, 2)), (1,)): -parse_expr(op.spec, "x[2]"),
    }


def _random_case(seed):
    rng = random.Random(seed)
    spec = random_bundle(rng, PROFILE)
    return spec, rng


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1_000_000))
def test_random_adjoint_laws(seed):
    spec, rng = _random_case(seed)
    op = random_operator(spec, rng, PROFILE)
    adjoint = adjoint_eta(op)
    assert op_equal(adjoint_eta(adjoint), op)
    assert op_equal(adjoint, adjoint_by_parts(op))
    assert is_variationally_trivial(pairing_defect(op))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 1_000_000))
def test_random_adjoint_reverses_composition(seed):
    spec, rng = _random_case(seed)
    inner = random_operator(spec, rng, PROFILE, ("s",), ("p",), OperatorRole.CHAIN_STAGE)
    outer = random_operator(spec, rng, PROFILE, ("p",), ("u", "w"))
    assert op_equal(adjoint_eta(compose(outer, inner)), compose(adjoint_eta(inner), adjoint_eta(outer)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 1_000_000))
def test_random_adjoint_laws_antisymmetric(seed):
    rng = random.Random(seed)
    spec = random_bundle(rng, PROFILE, antisym_chance=1.0)
    assert spec.family("v").antisym and spec.family("q").antisym
    op = random_operator(spec, rng, PROFILE, ("q", "s"), ("v", "w"))
    adjoint = adjoint_eta(op)
    assert set(adjoint.source) == {"v_bar", "w_bar"}
    assert op_equal(adjoint_eta(adjoint), op)
    assert op_equal(adjoint, adjoint_by_parts(op))
    assert is_variationally_trivial(pairing_defect(op))
    inner = random_operator(spec, rng, PROFILE, ("s",), ("q",), OperatorRole.CHAIN_STAGE)
    outer = random_operator(spec, rng, PROFILE, ("q",), ("v",))
    assert op_equal(adjoint_eta(compose(outer, inner)), compose(adjoint_eta(inner), adjoint_eta(outer)))
