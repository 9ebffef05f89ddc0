"""Tests for forms, the BF and Chern-Simons models and the model factory."""

import pytest

from noether_verify.algebra.bundle import CoordId, FamilyRole
from noether_verify.calculus.operators import OperatorRole, compose, op_equal
from noether_verify.calculus.variational import euler_lagrange
from noether_verify.errors import BundleMismatchError, ModelParameterError
from noether_verify.models import factory
from noether_verify.models.base import Model, ModelBuilder
from noether_verify.models.bf import (
    BF_CHECKS,
    ChainStage,
    bf_spec,
    chain_stages,
    expected_euler_lagrange,
)
from noether_verify.models.chern_simons import (
    CS_CHECKS,
    ChernSimonsTerms,
    build_chern_simons,
    cs_reparameterization,
    cs_splitting_variant,
    structure_constant,
)
from noether_verify.models.factory import (
    DEFAULT_SELECTORS,
    create_builder,
    create_model,
    mutate_sign,
    mutation_keys,
    register_builder,
    resolve_selectors,
)
from noether_verify.models.forms import (
    HorizontalForm,
    complement,
    current_of,
    d_h,
    increasing_tuples,
    levi_civita,
    top_density,
    wedge,
)
from noether_verify.runner.suites import verdicts
from noether_verify.theory.noether import gauge_to_noether, noether_rows


def test_levi_civita_and_complement():
    assert levi_civita((0, 1, 2)) == 1
    assert levi_civita((1, 0, 2)) == -1
    assert levi_civita((0, 0, 1)) == 0
    assert complement((1,), 3) == (0, 2)
    assert increasing_tuples(3, 2) == [(0, 1), (0, 2), (1, 2)]


def test_forms(bf_311):
    spec = bf_311.spec
    A = HorizontalForm.of_family(spec, "A")
    B = HorizontalForm.of_family(spec, "B")
    assert d_h(d_h(A)).is_zero()
    assert wedge(A, B).component((0, 1)) == -wedge(B, A).component((0, 1))
    assert wedge(A, A).is_zero()
    phi = wedge(A, B)
    assert top_density(d_h(phi)).coeff == current_of(phi).divergence().coeff
    with pytest.raises(ValueError):
        top_density(A)


def test_chain_stage_rule():
    assert chain_stages(1, 1) == []
    assert chain_stages(2, 2) == [ChainStage(0, ("alpha", 0), ("xi0", 0))]
    assert chain_stages(2, 3) == [
        ChainStage(0, ("alpha", 0), ("xi0", 1)),
        ChainStage(1, None, ("xi1", 0)),
    ]
    assert [s.families for s in chain_stages(4, 1)] == [("eps0",), ("eps1",), ("alpha",)]


def test_bf_spec_families():
    spec = bf_spec(6, 2, 3)
    assert spec.family("A").shape == (6, 6)
    assert spec.family("xi0").shape == (6,)
    assert spec.family("alpha").shape == ()
    assert spec.family("xi1_bar").role is FamilyRole.DUAL_PARAMETER
    assert len(spec.coords("B")) == 20


@pytest.mark.parametrize("n, p, q", [(4, 1, 1), (3, 0, 2), (2, 1, 1)])
def test_bf_parameters_validated(n, p, q):
    with pytest.raises(ModelParameterError):
        create_model(f"bf:{n}:{p}:{q}")


def test_bf_model(bf_311):
    assert bf_311.name == "bf:3:1:1"
    assert bf_311.expected_checks == BF_CHECKS
    assert bf_311.gauge_symmetry.role is OperatorRole.GAUGE_SYMMETRY
    assert set(bf_311.fields) == {"A", "B"}
    # L = eps^{i nu j} A_i d_nu B_j
    assert len(bf_311.lagrangian.coeff) == 6


@pytest.mark.parametrize("selector", ["bf:3:1:1", "bf:5:2:2", "bf:4:2:1"])
def test_bf_euler_lagrange_closed_form(selector):
    model = create_model(selector)
    p, q = (int(v) for v in selector.split(":")[2:])
    assert euler_lagrange(model.lagrangian, model.fields) == expected_euler_lagrange(model.spec, p, q)


def test_cs_model(cs_model):
    assert cs_model.name == "cs"
    assert cs_model.expected_checks == CS_CHECKS
    assert set(cs_model.gauge_symmetry.source) == {"xi", "tau"}
    assert structure_constant(0, 1, 2) == 1
    assert structure_constant(1, 0, 2) == -1
    assert structure_constant(0, 0, 2) == 0


def test_cs_curvature_is_antisymmetric(cs_model):
    terms = ChernSimonsTerms(cs_model.spec)
    assert terms.curvature(0, 1, 2) == -terms.curvature(0, 2, 1)
    assert terms.curvature(1, 0, 0).is_zero()


def test_cs_splitting_reproduces_symmetry(cs_model):
    variant = cs_splitting_variant(cs_model)
    h = cs_reparameterization(cs_model)
    assert h.role is OperatorRole.GENERIC
    assert op_equal(compose(variant, h), cs_model.gauge_symmetry)


def test_cs_displayed_xi_row_matches_generated(cs_model):
    el = euler_lagrange(cs_model.lagrangian, cs_model.fields)
    terms = ChernSimonsTerms(cs_model.spec)
    rows = noether_rows(gauge_to_noether(cs_model.gauge_symmetry), el)
    for q in range(3):
        assert rows[CoordId("xi_bar", (q,))] == terms.displayed_xi_row(q, el)


def test_cs_fe_witness(cs_model):
    el = euler_lagrange(cs_model.lagrangian, cs_model.fields)
    terms = ChernSimonsTerms(cs_model.spec)
    for mu in range(3):
        assert (terms.fe_row(mu, el) - terms.fe_witness(mu).combine(el, cs_model.spec)).is_zero()


def test_cs_rescaling_keeps_verdicts(cs_model):
    scaled = build_chern_simons(7)
    assert scaled.name == "cs*7"
    el = euler_lagrange(scaled.lagrangian, scaled.fields)
    assert verdicts(scaled, el) == (True, True)


def test_selectors():
    assert resolve_selectors("all") == list(DEFAULT_SELECTORS)
    assert resolve_selectors(" ALL ") == list(DEFAULT_SELECTORS)
    assert resolve_selectors("bf:3:1:1") == ["bf:3:1:1"]
    assert create_builder("bf:5:2:2").name == "bf:5:2:2"
    assert create_builder("CS").name == "cs"


@pytest.mark.parametrize("selector", ["ym", "cs:1", "bf:3:1", "bf:a:b:c"])
def test_bad_selectors(selector):
    with pytest.raises(ModelParameterError):
        create_builder(selector)


def test_mutate_sign_breaks_both_verdicts(bf_311):
    keys = mutation_keys(bf_311)
    assert len(keys) == 3
    mutant = mutate_sign(bf_311, keys[0])
    assert mutant.name == "bf:3:1:1~0"
    assert mutant.chain is None and mutant.sigma is None
    assert mutant.gauge_symmetry.coeffs[keys[0]] == -bf_311.gauge_symmetry.coeffs[keys[0]]
    el = euler_lagrange(bf_311.lagrangian, bf_311.fields)
    assert verdicts(mutant, el) == (False, False)
    assert verdicts(bf_311, el) == (True, True)
    with pytest.raises(KeyError):
        mutate_sign(bf_311, (CoordId("A", (0,)), CoordId("xi", ()), ()))


def test_register_builder(monkeypatch, stueckelberg):
    monkeypatch.setattr(factory, "BUILDERS", dict(factory.BUILDERS))

    class FixedBuilder(ModelBuilder):
        @property
        def name(self) -> str:
            return "stueckelberg"

        def build(self) -> Model:
            return stueckelberg

    register_builder("Stueckelberg", FixedBuilder)
    assert create_model("stueckelberg") is stueckelberg


def test_model_rejects_partial_symmetry(stueckelberg):
    restricted = stueckelberg.gauge_symmetry.restrict_target(["y"])
    with pytest.raises(BundleMismatchError, match="dynamic fields"):
        Model("broken", stueckelberg.spec, stueckelberg.lagrangian, restricted)


def test_builders_are_pure():
    assert create_model("bf:3:1:1").lagrangian == create_model("bf:3:1:1").lagrangian
