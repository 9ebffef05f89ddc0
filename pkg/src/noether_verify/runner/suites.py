"""Named check suites per model."""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional

from ..algebra.bundle import CoordId
from ..algebra.expr import Expr
from ..algebra.parser import format_coordinate, format_expr
from ..calculus.operators import adjoint_eta, compose, op_equal
from ..calculus.variational import (
    CurrentVector,
    EulerLagrange,
    GeneralizedVectorField,
    euler_lagrange,
    first_variational_residual,
    is_variationally_trivial,
    lie_derive_density,
    noether_current,
    occurring_jets,
    substitute_section,
    total_derivative,
    variational_summands,
)
from ..errors import NoetherError
from ..models.base import Model
from ..models.bf import expected_euler_lagrange
from ..models.chern_simons import (
    DIM,
    RANK,
    ChernSimonsTerms,
    cs_reparameterization,
    cs_splitting_variant,
    cs_variant_witnesses,
)
from ..models.factory import mutate_sign, mutation_keys
from ..theory.chains import check_dual_chain, check_reducibility_chain, dual_noether_chain
from ..theory.noether import (
    check_gauge_symmetry,
    check_noether_identity,
    check_on_shell_zero,
    gauge_to_noether,
    gauge_vector_field,
    noether_rows,
    noether_to_gauge,
)
from ..theory.oracle import NumericOracle
from ..theory.report import DEFAULT_RESIDUAL_TERMS, ORACLE_DISAGREES, CheckResult, residual_text


@dataclass(frozen=True)
class SuiteSettings:
    """Knobs shared by all checks of a run."""

    oracle_points: int = 20
    oracle_seed: int = 0
    residual_terms: int = DEFAULT_RESIDUAL_TERMS

    @classmethod
    def from_config(cls, verify: dict[str, Any]) -> "SuiteSettings":
        return cls(
            oracle_points=int(verify.get("oracle_points", 20)),
            oracle_seed=int(verify.get("oracle_seed", 0)),
            residual_terms=int(verify.get("residual_terms", DEFAULT_RESIDUAL_TERMS)),
        )

    @property
    def oracle(self) -> Optional[NumericOracle]:
        if self.oracle_points <= 0:
            return None
        return NumericOracle(points=self.oracle_points, seed=self.oracle_seed)


@dataclass(frozen=True)
class NamedCheck:
    """A check name and the callable producing its results."""

    name: str
    run: Callable[[], list[CheckResult]]


class ModelContext:
    """Per-model values shared by the checks, computed once."""

    def __init__(self, model: Model, settings: SuiteSettings):
        self.model = model
        self.settings = settings
        self.spec = model.spec
        self.el: EulerLagrange = euler_lagrange(model.lagrangian, model.fields)
        self.delta = gauge_to_noether(model.gauge_symmetry)

    @property
    def oracle(self) -> Optional[NumericOracle]:
        return self.settings.oracle

    @property
    def terms(self) -> int:
        return self.settings.residual_terms


def _noether_check(
    ctx: ModelContext, name: str = "noether-identity", dual_family: Optional[str] = None
) -> list[CheckResult]:
    delta = ctx.delta.restrict_target([dual_family]) if dual_family else ctx.delta
    return [
        check_noether_identity(
            delta,
            ctx.el,
            name,
            witnesses=ctx.model.noether_witnesses,
            oracle=ctx.oracle,
            residual_terms=ctx.terms,
        )
    ]


def _gauge_check(ctx: ModelContext) -> list[CheckResult]:
    return [
        check_gauge_symmetry(
            ctx.model.gauge_symmetry, ctx.model.lagrangian, oracle=ctx.oracle, residual_terms=ctx.terms
        )
    ]


def _roundtrip_check(ctx: ModelContext) -> list[CheckResult]:
    upsilon = ctx.model.gauge_symmetry
    twice = adjoint_eta(adjoint_eta(upsilon))
    back = noether_to_gauge(ctx.delta)
    reverse = gauge_to_noether(back)
    if not op_equal(twice, upsilon) or not op_equal(back, upsilon):
        return [CheckResult.failed("eta-roundtrip", "eta(eta(upsilon)) differs from upsilon")]
    if not op_equal(reverse, ctx.delta):
        return [CheckResult.failed("eta-roundtrip", "eta(eta(Delta)) differs from Delta")]
    return [CheckResult.passed("eta-roundtrip", coefficients=len(upsilon.coeffs))]


def verdicts(model: Model, el: EulerLagrange, failure_level: int = logging.WARNING) -> tuple[bool, bool]:
    """(gauge-symmetry passes, Noether identity passes) for one model."""
    gauge = check_gauge_symmetry(model.gauge_symmetry, model.lagrangian, failure_level=failure_level).ok
    noether = check_noether_identity(
        gauge_to_noether(model.gauge_symmetry),
        el,
        witnesses=model.noether_witnesses,
        failure_level=failure_level,
    ).ok
    return gauge, noether


def _equivalence_check(ctx: ModelContext, mutants: int = 3) -> list[CheckResult]:
    models = [ctx.model] + [mutate_sign(ctx.model, key) for key in mutation_keys(ctx.model, mutants)]
    records = {}
    disagree = []
    for model in models:
        # mutants are expected to fail
        level = logging.WARNING if model is ctx.model else logging.DEBUG
        gauge, noether = verdicts(model, ctx.el, level)
        records[model.name] = {"gauge": gauge, "noether": noether}
        if gauge != noether:
            disagree.append(model.name)
    if disagree:
        return [CheckResult.failed("theorem-equivalence", f"verdicts differ for {', '.join(disagree)}", verdicts=records)]
    return [CheckResult.passed("theorem-equivalence", verdicts=records)]


def parameter_section(ctx: ModelContext, families: tuple[str, ...]) -> dict[CoordId, Expr]:
    """Fixed polynomial section: coordinate c gets x^(c mod n) x^(c+1 mod n) + c + 1."""
    n = ctx.spec.base_dim
    section = {}
    for c, coord in enumerate(ctx.spec.coords_of(families)):
        first = Expr.coordinate(ctx.spec, "x", (c % n,))
        second = Expr.coordinate(ctx.spec, "x", ((c + 1) % n,))
        section[coord] = first * second + (c + 1)
    return section


def _first_variation_check(ctx: ModelContext) -> list[CheckResult]:
    upsilon = ctx.model.gauge_symmetry
    images = gauge_vector_field(upsilon).components
    section = parameter_section(ctx, upsilon.source)
    components = {
        coord: substitute_section(value, section, upsilon.source) for coord, value in images.items()
    }
    field = GeneralizedVectorField.from_components(ctx.spec, components, upsilon.target)
    residual = first_variational_residual(ctx.model.lagrangian, field)
    if not is_variationally_trivial(residual):
        return [CheckResult.failed("first-variation", residual_text(residual.coeff, ctx.terms))]
    detail: dict[str, Any] = {"residual_terms": len(residual.coeff)}
    if ctx.oracle is not None:
        jets = occurring_jets(residual, ctx.spec.non_base_families())
        detail["oracle_points"] = ctx.oracle.points
        if not all(
            ctx.oracle.sum_vanishes(variational_summands(residual.coeff, coord, jets[coord])) for coord in jets
        ):
            return [CheckResult.failed("first-variation", ORACLE_DISAGREES, **detail)]
    return [CheckResult.passed("first-variation", **detail)]


# Chern-Simons


def _relation(generated: Expr, displayed: Expr) -> str:
    if generated == displayed:
        return "equal"
    if generated == -displayed:
        return "negated"
    return "different"


def _cs_displayed_rows(ctx: ModelContext) -> list[CheckResult]:
    """Generated xi and tau rows next to the identities as usually written.

    The generated rows carry the verdict; a sign difference to the
    written form is reported, not failed.
    """
    terms = ChernSimonsTerms(ctx.spec)
    rows = noether_rows(ctx.delta, ctx.el)
    displayed = {ctx.spec.dual(CoordId("xi", (q,))): terms.displayed_xi_row(q, ctx.el) for q in range(RANK)}
    displayed.update(
        {ctx.spec.dual(CoordId("tau", (mu,))): terms.displayed_tau_row(mu, ctx.el) for mu in range(DIM)}
    )
    relations = {}
    failing = {}
    for coord, written in displayed.items():
        generated = rows[coord]
        relations[format_coordinate(coord)] = {
            "generated": format_expr(generated, ctx.terms),
            "displayed": format_expr(written, ctx.terms),
            "relation": _relation(generated, written),
        }
        if not generated.is_zero():
            failing[coord] = generated
        elif not written.is_zero():
            failing[coord] = written
    if failing:
        return [CheckResult.failed("tau-rows-displayed", residual_text(failing, ctx.terms), rows=relations)]
    return [CheckResult.passed("tau-rows-displayed", rows=relations)]


def _cs_fe_witness(ctx: ModelContext) -> list[CheckResult]:
    terms = ChernSimonsTerms(ctx.spec)
    failing = []
    exact = []
    agrees = True
    for mu in range(DIM):
        row = terms.fe_row(mu, ctx.el)
        witness = terms.fe_witness(mu)
        if not check_on_shell_zero(row, ctx.el, witness):
            failing.append(str(mu))
        exact.append(row.is_zero())
        if ctx.oracle is not None:
            agrees = agrees and ctx.oracle.sum_vanishes([row] + [-t for t in witness.summands(ctx.el)])
    if failing:
        return [CheckResult.failed("fe-witness", f"witness mismatch for mu in {', '.join(failing)}")]
    detail: dict[str, Any] = {"exactly_zero": all(exact)}
    if ctx.oracle is not None:
        detail["oracle_points"] = ctx.oracle.points
        if not agrees:
            return [CheckResult.failed("fe-witness", ORACLE_DISAGREES, **detail)]
    return [CheckResult.passed("fe-witness", **detail)]


def _cs_splitting(ctx: ModelContext) -> list[CheckResult]:
    variant = cs_splitting_variant(ctx.model)
    gauge = check_gauge_symmetry(
        variant,
        ctx.model.lagrangian,
        name="splitting-variant: gauge-symmetry",
        oracle=ctx.oracle,
        residual_terms=ctx.terms,
    )
    noether = check_noether_identity(
        gauge_to_noether(variant),
        ctx.el,
        name="splitting-variant: noether-identity",
        witnesses=cs_variant_witnesses(ctx.model),
        oracle=ctx.oracle,
        residual_terms=ctx.terms,
    )
    return [gauge, noether]


def _cs_reparameterization(ctx: ModelContext) -> list[CheckResult]:
    variant = cs_splitting_variant(ctx.model)
    h = cs_reparameterization(ctx.model)
    recovered = compose(variant, h)
    if not op_equal(recovered, ctx.model.gauge_symmetry):
        difference = recovered - ctx.model.gauge_symmetry
        rows = {key[0]: value for key, value in difference.sorted_coeffs()}
        return [CheckResult.failed("splitting-reparameterization", residual_text(rows, ctx.terms))]
    return [CheckResult.passed("splitting-reparameterization", coefficients=len(recovered.coeffs))]


def cs_suite(ctx: ModelContext) -> list[NamedCheck]:
    return [
        NamedCheck("gauge-symmetry", lambda: _gauge_check(ctx)),
        NamedCheck("noether-identity", lambda: _noether_check(ctx)),
        NamedCheck("noether-xi-rows", lambda: _noether_check(ctx, "noether-xi-rows", "xi_bar")),
        NamedCheck("noether-tau-rows", lambda: _noether_check(ctx, "noether-tau-rows", "tau_bar")),
        NamedCheck("tau-rows-displayed", lambda: _cs_displayed_rows(ctx)),
        NamedCheck("fe-witness", lambda: _cs_fe_witness(ctx)),
        NamedCheck("eta-roundtrip", lambda: _roundtrip_check(ctx)),
        NamedCheck("splitting-variant", lambda: _cs_splitting(ctx)),
        NamedCheck("splitting-reparameterization", lambda: _cs_reparameterization(ctx)),
        NamedCheck("first-variation", lambda: _first_variation_check(ctx)),
        NamedCheck("theorem-equivalence", lambda: _equivalence_check(ctx)),
    ]


# BF


def _bf_euler_lagrange(ctx: ModelContext, p: int, q: int) -> list[CheckResult]:
    expected = expected_euler_lagrange(ctx.spec, p, q)
    failing = {c: ctx.el[c] - expected[c] for c in expected if ctx.el[c] != expected[c]}
    if failing:
        return [CheckResult.failed("euler-lagrange-components", residual_text(failing, ctx.terms))]
    detail: dict[str, Any] = {"components": len(expected)}
    if ctx.oracle is not None:
        density = ctx.model.lagrangian.coeff
        jets = occurring_jets(density, ctx.model.fields)
        detail["oracle_points"] = ctx.oracle.points
        for coord, value in expected.items():
            summands = variational_summands(density, coord, jets.get(coord, ())) + [-value]
            if not ctx.oracle.sum_vanishes(summands):
                return [CheckResult.failed("euler-lagrange-components", ORACLE_DISAGREES, **detail)]
    return [CheckResult.passed("euler-lagrange-components", **detail)]


def _divergence_summands(current: CurrentVector) -> list[Expr]:
    return [total_derivative(component, index) for index, component in enumerate(current.components)]


def _bf_sigma(ctx: ModelContext) -> list[CheckResult]:
    sigma = ctx.model.sigma
    if sigma is None:
        return [CheckResult.skipped("sigma-identity", "model has no sigma")]
    lie = lie_derive_density(ctx.model.lagrangian, gauge_vector_field(ctx.model.gauge_symmetry))
    difference = lie.coeff - sigma.divergence().coeff
    if not difference.is_zero():
        return [CheckResult.failed("sigma-identity", residual_text(difference, ctx.terms))]
    detail: dict[str, Any] = {}
    if ctx.oracle is not None:
        detail["oracle_points"] = ctx.oracle.points
        if not ctx.oracle.sum_vanishes([lie.coeff] + [-t for t in _divergence_summands(sigma)]):
            return [CheckResult.failed("sigma-identity", ORACLE_DISAGREES, **detail)]
    return [CheckResult.passed("sigma-identity", **detail)]


def _bf_current(ctx: ModelContext) -> list[CheckResult]:
    sigma = ctx.model.sigma
    if sigma is None:
        return [CheckResult.skipped("noether-current", "model has no sigma")]
    field = gauge_vector_field(ctx.model.gauge_symmetry)
    try:
        current = noether_current(ctx.model.lagrangian, field, sigma)
    except NoetherError as e:
        return [CheckResult.failed("noether-current", str(e))]
    detail: dict[str, Any] = {"nonzero_components": sum(1 for c in current.components if c)}
    if ctx.oracle is not None:
        # d_l J^l + upsilon^i E_i, term by term
        summands = _divergence_summands(current) + [
            value * ctx.el[coord] for coord, value in field.components.items() if coord in ctx.el
        ]
        detail["oracle_points"] = ctx.oracle.points
        if not ctx.oracle.sum_vanishes(summands):
            return [CheckResult.failed("noether-current", ORACLE_DISAGREES, **detail)]
    return [CheckResult.passed("noether-current", **detail)]


def _bf_chain(ctx: ModelContext) -> list[CheckResult]:
    chain = ctx.model.chain
    if chain is None:
        return [CheckResult.skipped("chain", "model has no chain")]
    return check_reducibility_chain(
        ctx.model.gauge_symmetry, chain, ctx.el, oracle=ctx.oracle, residual_terms=ctx.terms
    )


def _bf_dual_chain(ctx: ModelContext) -> list[CheckResult]:
    chain = ctx.model.chain
    if chain is None:
        return [CheckResult.skipped("dual-chain", "model has no chain")]
    duals = dual_noether_chain(chain)
    results = check_dual_chain(ctx.delta, duals, oracle=ctx.oracle, residual_terms=ctx.terms)
    if duals:
        recovered = all(op_equal(adjoint_eta(d), s) for d, s in zip(duals, chain.stages))
        if recovered:
            results.append(CheckResult.passed("dual-chain: involution", stages=len(duals)))
        else:
            results.append(CheckResult.failed("dual-chain: involution", "eta of a dual stage differs from the stage"))
    return results


def bf_suite(ctx: ModelContext, p: int, q: int) -> list[NamedCheck]:
    return [
        NamedCheck("gauge-symmetry", lambda: _gauge_check(ctx)),
        NamedCheck("noether-eps-rows", lambda: _noether_check(ctx, "noether-eps-rows", "eps_bar")),
        NamedCheck("noether-xi-rows", lambda: _noether_check(ctx, "noether-xi-rows", "xi_bar")),
        NamedCheck("euler-lagrange-components", lambda: _bf_euler_lagrange(ctx, p, q)),
        NamedCheck("sigma-identity", lambda: _bf_sigma(ctx)),
        NamedCheck("noether-current", lambda: _bf_current(ctx)),
        NamedCheck("chain", lambda: _bf_chain(ctx)),
        NamedCheck("dual-chain", lambda: _bf_dual_chain(ctx)),
        NamedCheck("eta-roundtrip", lambda: _roundtrip_check(ctx)),
        NamedCheck("theorem-equivalence", lambda: _equivalence_check(ctx)),
    ]


def build_suite(model: Model, settings: SuiteSettings) -> list[NamedCheck]:
    """Checks for a model, chosen by its selector."""
    ctx = ModelContext(model, settings)
    # sign mutants are named "<selector>~<position>"
    head, *params = model.name.split("~")[0].split(":")
    if head.startswith("cs"):
        return cs_suite(ctx)
    if head == "bf":
        _, p, q = (int(v) for v in params)
        return bf_suite(ctx, p, q)
    return [
        NamedCheck("gauge-symmetry", lambda: _gauge_check(ctx)),
        NamedCheck("noether-identity", lambda: _noether_check(ctx)),
        NamedCheck("eta-roundtrip", lambda: _roundtrip_check(ctx)),
    ]
