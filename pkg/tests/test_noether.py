"""Tests for Noether's second theorem: both directions, witnesses and trivial symmetries."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noether_verify.algebra.bundle import BundleSpec, CoordId, FamilyRole, FieldFamily, with_duals
from noether_verify.algebra.expr import Density, Expr
from noether_verify.algebra.indices import EMPTY, SymMultiIndex
from noether_verify.algebra.parser import parse_expr
from noether_verify.algebra.random_expr import ExprProfile, random_expr_from
from noether_verify.calculus.operators import LinearDiffOp, OperatorRole, adjoint_eta, op_equal
from noether_verify.calculus.variational import euler_lagrange, total_derivative
from noether_verify.errors import AntisymmetryError, MissingComponentError, RoleError
from noether_verify.theory.noether import (
    CofactorTable,
    OnShellWitness,
    check_factorization,
    check_gauge_symmetry,
    check_noether_identity,
    check_on_shell_zero,
    gauge_to_noether,
    gauge_vector_field,
    make_trivial_gauge_symmetry,
    noether_rows,
    noether_to_gauge,
)
from noether_verify.theory.oracle import NumericOracle
from noether_verify.theory.report import CheckStatus

Y, Z, XI = CoordId("y", ()), CoordId("z", ()), CoordId("xi", ())
Y_BAR, Z_BAR, XI_BAR = CoordId("y_bar", ()), CoordId("z_bar", ()), CoordId("xi_bar", ())


@pytest.fixture(scope="module")
def el(stueckelberg):
    return euler_lagrange(stueckelberg.lagrangian, stueckelberg.fields)


def test_euler_lagrange_of_gauge_model(stueckelberg, el):
    spec = stueckelberg.spec
    assert el[Y] == parse_expr(spec, "-y[;(0,0)] + z[;(0)]")
    assert el[Z] == parse_expr(spec, "-y[;(0)] + z")


def test_both_directions(stueckelberg):
    delta = gauge_to_noether(stueckelberg.gauge_symmetry)
    assert delta.role is OperatorRole.NOETHER
    assert delta.coeff(XI_BAR, Y_BAR) == 1
    assert delta.coeff(XI_BAR, Z_BAR, (0,)) == -1
    assert op_equal(noether_to_gauge(delta), stueckelberg.gauge_symmetry)
    with pytest.raises(RoleError):
        gauge_to_noether(delta)
    with pytest.raises(RoleError):
        noether_to_gauge(stueckelberg.gauge_symmetry)


def test_gauge_symmetry_and_identity_hold(stueckelberg, el):
    oracle = NumericOracle(points=5)
    gauge = check_gauge_symmetry(stueckelberg.gauge_symmetry, stueckelberg.lagrangian, oracle=oracle)
    assert gauge.status is CheckStatus.PASS
    assert gauge.detail["oracle_points"] == 5
    delta = gauge_to_noether(stueckelberg.gauge_symmetry)
    assert noether_rows(delta, el) == {XI_BAR: 0}
    assert check_noether_identity(delta, el, oracle=oracle).ok


def test_sign_flip_breaks_both(stueckelberg, el):
    upsilon = stueckelberg.gauge_symmetry
    coeffs = dict(upsilon.coeffs)
    coeffs[(Y, XI, EMPTY)] = -coeffs[(Y, XI, EMPTY)]
    flipped = upsilon.with_coeffs(coeffs)
    gauge = check_gauge_symmetry(flipped, stueckelberg.lagrangian)
    noether = check_noether_identity(gauge_to_noether(flipped), el)
    assert gauge.status is CheckStatus.FAIL
    assert noether.status is CheckStatus.FAIL
    assert noether.residual.startswith("xi_bar: ")


def test_shift_is_not_a_symmetry_of_mass_term(line_spec):
    shift = LinearDiffOp(line_spec, ("xi",), ("y",), {(Y, XI, ()): Expr.constant(line_spec, 1)})
    result = check_gauge_symmetry(shift, Density(parse_expr(line_spec, "1/2*y^2")))
    assert result.status is CheckStatus.FAIL
    assert "xi" in result.residual


def test_gauge_vector_field(stueckelberg):
    field = gauge_vector_field(stueckelberg.gauge_symmetry)
    spec = stueckelberg.spec
    assert field.component(Y) == parse_expr(spec, "xi")
    assert field.component(Z) == parse_expr(spec, "xi[;(0)]")


def test_on_shell_witness(stueckelberg, el):
    spec = stueckelberg.spec
    witness = OnShellWitness({(Y, EMPTY): Expr.constant(spec, 3), (Z, (0,)): parse_expr(spec, "x[0]")})
    expr = el[Y].scale(3) + parse_expr(spec, "x[0]") * parse_expr(spec, "-y[;(0,0)] + z[;(0)]")
    assert check_on_shell_zero(expr, el, witness)
    assert not check_on_shell_zero(expr, el)
    assert check_on_shell_zero(Expr.zero(spec), el)


def test_shifted_witness(stueckelberg, el):
    spec = stueckelberg.spec
    witness = OnShellWitness({(Y, EMPTY): parse_expr(spec, "y"), (Z, EMPTY): parse_expr(spec, "x[0]")})
    value = witness.combine(el, spec)
    assert witness.shifted(0).combine(el, spec) == total_derivative(value, 0)


def test_witness_needs_known_components(stueckelberg, el):
    witness = OnShellWitness({(XI, EMPTY): Expr.constant(stueckelberg.spec, 1)})
    with pytest.raises(MissingComponentError):
        witness.combine(el, stueckelberg.spec)


def test_identity_on_shell_with_witness(stueckelberg, el):
    spec = stueckelberg.spec
    delta = LinearDiffOp(
        spec,
        ("y_bar", "z_bar"),
        ("xi_bar",),
        {
            (XI_BAR, Y_BAR, ()): parse_expr(spec, "1 + y"),
            (XI_BAR, Z_BAR, (0,)): Expr.constant(spec, -1),
        },
    )
    assert not check_noether_identity(delta, el).ok
    witnesses = {XI_BAR: OnShellWitness({(Y, EMPTY): parse_expr(spec, "y")})}
    result = check_noether_identity(delta, el, witnesses=witnesses)
    assert result.ok
    assert result.detail["on_shell_rows"] == ["xi_bar"]


def test_trivial_gauge_symmetry(stueckelberg, el):
    spec = stueckelberg.spec
    table = CofactorTable.antisymmetric_pair(spec, XI, (Y, ()), (Z, ()), Expr.constant(spec, 1))
    trivial = make_trivial_gauge_symmetry(table, el)
    assert trivial.role is OperatorRole.GAUGE_SYMMETRY
    assert trivial.coeff(Y, XI) == el[Z]
    assert trivial.coeff(Z, XI) == -el[Y]
    assert check_gauge_symmetry(trivial, stueckelberg.lagrangian).ok
    assert check_noether_identity(adjoint_eta(trivial), el).ok


def test_cofactor_table_must_be_antisymmetric(stueckelberg):
    spec = stueckelberg.spec
    with pytest.raises(AntisymmetryError):
        CofactorTable(spec, ("xi",), ("y", "z"), {(XI, Y, Z, EMPTY, EMPTY): Expr.constant(spec, 1)})


def test_factorization_certificate(stueckelberg, el):
    spec = stueckelberg.spec
    upsilon = stueckelberg.gauge_symmetry
    table = CofactorTable.antisymmetric_pair(spec, XI, (Y, ()), (Z, ()), Expr.constant(spec, 1))
    candidate = upsilon + make_trivial_gauge_symmetry(table, el)
    h = LinearDiffOp.identity(spec, "xi", "xi")
    witnesses = {
        (Y, XI, EMPTY): OnShellWitness({(Z, EMPTY): Expr.constant(spec, 1)}),
        (Z, XI, EMPTY): OnShellWitness({(Y, EMPTY): Expr.constant(spec, -1)}),
    }
    result = check_factorization(upsilon, candidate, h, witnesses, el)
    assert result.ok
    assert result.detail["witnessed"] == 2
    assert not check_factorization(upsilon, candidate, h, {}, el).ok


@pytest.fixture(scope="module")
def free_pair():
    """L = 1/2 (y^0_(0))^2 + 1/2 (y^1_(0))^2 over one base dimension."""
    families = [FieldFamily("y", FamilyRole.FIELD, (2,)), FieldFamily("xi", FamilyRole.PARAMETER)]
    spec = BundleSpec(1, tuple(with_duals(families)))
    lagrangian = Density(parse_expr(spec, "1/2*y[0;(0)]^2 + 1/2*y[1;(0)]^2"))
    return spec, lagrangian, euler_lagrange(lagrangian, ("y",))


def test_trivial_gauge_symmetry_of_free_pair(free_pair):
    spec, lagrangian, el = free_pair
    y0, y1 = CoordId("y", (0,)), CoordId("y", (1,))
    table = CofactorTable.antisymmetric_pair(spec, XI, (y0, ()), (y1, ()), Expr.constant(spec, 1))
    trivial = make_trivial_gauge_symmetry(table, el)
    assert not trivial.is_zero()
    assert trivial.coeff(y0, XI) == parse_expr(spec, "-y[1;(0,0)]")
    assert trivial.coeff(y1, XI) == parse_expr(spec, "y[0;(0,0)]")
    assert check_gauge_symmetry(trivial, lagrangian).ok
    assert all(row.is_zero() for row in noether_rows(adjoint_eta(trivial), el).values())


def test_empty_cofactor_table_gives_zero_operator(free_pair):
    spec, _, el = free_pair
    trivial = make_trivial_gauge_symmetry(CofactorTable(spec, ("xi",), ("y",), {}), el)
    assert trivial.is_zero()
    assert trivial.role is OperatorRole.GAUGE_SYMMETRY


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 1_000_000))
def test_random_antisymmetric_cofactors_give_gauge_symmetries(free_pair, seed):
    spec, lagrangian, el = free_pair
    rng = random.Random(seed)
    profile = ExprProfile(families=("x", "y"), max_jet_order=1, max_degree=2, max_terms=2)
    slots = [(coord, SymMultiIndex(jet)) for coord in spec.coords("y") for jet in ((), (0,))]
    entries = {}
    for _ in range(rng.randint(1, 3)):
        (i, lam), (j, sig) = rng.sample(slots, 2)
        value = random_expr_from(spec, rng, profile)
        for key, term in (((XI, i, j, lam, sig), value), ((XI, j, i, sig, lam), -value)):
            entries[key] = entries[key] + term if key in entries else term
    trivial = make_trivial_gauge_symmetry(CofactorTable(spec, ("xi",), ("y",), entries), el)
    assert check_gauge_symmetry(trivial, lagrangian).ok
    assert check_noether_identity(adjoint_eta(trivial), el).ok
