"""Randomized exact property suites for the adjoint and the variational calculus.

Every trial draws its case from ``random.Random(trial_seed)``, so a failing
trial is reproduced by its seed alone. A failing case is shrunk greedily:
coefficients and terms are dropped while the property still fails.
"""

import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Optional, Union

from ..algebra.bundle import BundleSpec, FamilyRole, FieldFamily, with_duals
from ..algebra.expr import Expr
from ..algebra.parser import format_expr
from ..algebra.random_expr import ExprProfile, random_expr_from
from ..algebra.indices import SymMultiIndex
from ..calculus.operators import (
    LinearDiffOp,
    OperatorRole,
    adjoint_by_parts,
    adjoint_eta,
    compose,
    op_equal,
    pairing_defect,
)
from ..calculus.variational import (
    CurrentVector,
    is_variationally_trivial,
    total_derivative,
    variational_residual,
)
from ..errors import NoetherError
from ..theory.report import CheckResult, VerificationReport
from ..utils.logger import get_logger

_logger = get_logger("runner.properties")

Eta = Callable[[LinearDiffOp], LinearDiffOp]
Part = Union[LinearDiffOp, Expr, CurrentVector]


@dataclass(frozen=True)
class PropertyProfile:
    """Size bounds of the random cases."""

    max_order: int = 3
    max_degree: int = 2
    max_base_dim: int = 3
    max_terms: int = 4

    def __post_init__(self) -> None:
        if min(self.max_order, self.max_degree, self.max_terms) < 0 or self.max_base_dim < 1:
            raise ValueError("Property bounds must be non-negative and max_base_dim positive")

    @classmethod
    def from_config(cls, section: dict[str, Any], order: Optional[int] = None) -> "PropertyProfile":
        return cls(
            max_order=int(order if order is not None else section.get("max_order", 3)),
            max_degree=int(section.get("max_degree", 2)),
            max_base_dim=int(section.get("max_base_dim", 3)),
            max_terms=int(section.get("max_terms", 4)),
        )


# random cases


def random_bundle(rng: random.Random, profile: PropertyProfile, antisym_chance: float = 0.5) -> BundleSpec:
    """Fields ``u`` (vector) and ``w`` (scalar), parameters ``p`` and ``s``, with duals.

    With probability ``antisym_chance`` the bundle also gets an antisymmetric
    rank-2 field ``v`` and parameter ``q``.
    """
    n = rng.randint(1, profile.max_base_dim)
    families = [
        FieldFamily("u", FamilyRole.FIELD, (rng.randint(1, 2),)),
        FieldFamily("w", FamilyRole.FIELD),
        FieldFamily("p", FamilyRole.PARAMETER, (rng.randint(1, 2),)),
        FieldFamily("s", FamilyRole.PARAMETER),
    ]
    if rng.random() < antisym_chance:
        k = rng.randint(2, 3)
        families += [
            FieldFamily("v", FamilyRole.FIELD, (k, k), antisym=True),
            FieldFamily("q", FamilyRole.PARAMETER, (k, k), antisym=True),
        ]
    return BundleSpec(n, tuple(with_duals(families)))


def family_names(spec: BundleSpec, role: FamilyRole) -> tuple[str, ...]:
    return tuple(f.name for f in spec.families if f.role is role)


def _coefficient_profile(spec: BundleSpec, profile: PropertyProfile) -> ExprProfile:
    return ExprProfile(
        families=("x",) + family_names(spec, FamilyRole.FIELD),
        max_jet_order=1,
        max_degree=profile.max_degree,
        max_terms=2,
    )


def _nonzero_expr(spec: BundleSpec, rng: random.Random, profile: ExprProfile) -> Expr:
    value = random_expr_from(spec, rng, profile)
    return value if not value.is_zero() else Expr.constant(spec, 1)


def random_operator(
    spec: BundleSpec,
    rng: random.Random,
    profile: PropertyProfile,
    source: Optional[tuple[str, ...]] = None,
    target: Optional[tuple[str, ...]] = None,
    role: Optional[OperatorRole] = None,
) -> LinearDiffOp:
    """Operator with 1..max_terms nonzero coefficients over base and field jets.

    ``source`` defaults to every parameter family, ``target`` to every field family.
    """
    source = source or family_names(spec, FamilyRole.PARAMETER)
    target = target or family_names(spec, FamilyRole.FIELD)
    expr_profile = _coefficient_profile(spec, profile)
    sources = spec.coords_of(source)
    targets = spec.coords_of(target)
    coeffs = {}
    for _ in range(rng.randint(1, max(1, profile.max_terms))):
        order = rng.randint(0, profile.max_order)
        jet = SymMultiIndex(rng.randrange(spec.base_dim) for _ in range(order))
        key = (rng.choice(targets), rng.choice(sources), jet)
        coeffs[key] = _nonzero_expr(spec, rng, expr_profile)
    return LinearDiffOp(spec, source, target, coeffs, role)


def _field_expr_profile(spec: BundleSpec, profile: PropertyProfile) -> ExprProfile:
    return ExprProfile(
        families=("x",) + family_names(spec, FamilyRole.FIELD),
        max_jet_order=profile.max_order,
        max_degree=profile.max_degree,
        max_terms=profile.max_terms,
    )


def random_current(spec: BundleSpec, rng: random.Random, profile: PropertyProfile) -> CurrentVector:
    expr_profile = _field_expr_profile(spec, profile)
    return CurrentVector(tuple(random_expr_from(spec, rng, expr_profile) for _ in range(spec.base_dim)))


def _random_field_expr(spec: BundleSpec, rng: random.Random, profile: PropertyProfile) -> Expr:
    return random_expr_from(spec, rng, _field_expr_profile(spec, profile))


# properties


@dataclass(frozen=True)
class PropertySuite:
    """A named property: ``draw`` builds the case parts, ``holds`` judges them."""

    name: str
    description: str
    draw: Callable[[BundleSpec, random.Random, PropertyProfile], tuple[Part, ...]]
    holds: Callable[[tuple[Part, ...], Eta], bool]


def _draw_operator(spec, rng, profile):
    return (random_operator(spec, rng, profile),)


def _draw_pair(spec, rng, profile):
    middle = tuple(name for name in family_names(spec, FamilyRole.PARAMETER) if name != "s")
    inner = random_operator(spec, rng, profile, ("s",), middle, OperatorRole.CHAIN_STAGE)
    outer = random_operator(spec, rng, profile, middle)
    return (outer, inner)


def _draw_current(spec, rng, profile):
    return (random_current(spec, rng, profile),)


def _draw_product(spec, rng, profile):
    return (
        _random_field_expr(spec, rng, profile),
        _random_field_expr(spec, rng, profile),
        Expr.constant(spec, rng.randrange(spec.base_dim)),
    )


def _eta_involution(parts, eta: Eta) -> bool:
    (op,) = parts
    return op_equal(eta(eta(op)), op)


def _eta_antihom(parts, eta: Eta) -> bool:
    outer, inner = parts
    return op_equal(eta(compose(outer, inner)), compose(eta(inner), eta(outer)))


def _pairing_defect(parts, eta: Eta) -> bool:
    (op,) = parts
    return is_variationally_trivial(pairing_defect(op, eta))


def _dh_delta(parts, eta: Eta) -> bool:
    (current,) = parts
    return not variational_residual(current.divergence())


def _leibniz(parts, eta: Eta) -> bool:
    f, g, index = parts
    lam = int(index.constant_value())
    return total_derivative(f * g, lam) == total_derivative(f, lam) * g + f * total_derivative(g, lam)


def _eta_oracle(parts, eta: Eta) -> bool:
    (op,) = parts
    return op_equal(eta(op), adjoint_by_parts(op))


SUITES: dict[str, PropertySuite] = {
    suite.name: suite
    for suite in (
        PropertySuite("eta-involution", "eta(eta(op)) = op", _draw_operator, _eta_involution),
        PropertySuite("eta-antihom", "eta(u after v) = eta(v) after eta(u)", _draw_pair, _eta_antihom),
        PropertySuite("pairing-defect", "<q, op(xi)> - <eta(op)(q), xi> is d_H-exact", _draw_operator, _pairing_defect),
        PropertySuite("dh-delta", "Euler-Lagrange of a divergence vanishes", _draw_current, _dh_delta),
        PropertySuite("leibniz", "d(fg) = d(f) g + f d(g)", _draw_product, _leibniz),
        PropertySuite("eta-oracle", "eta agrees with integration by parts", _draw_operator, _eta_oracle),
    )
}


# shrinking


def _shrink_expr(expr: Expr) -> Iterator[Expr]:
    terms = expr.sorted_terms()
    for i in range(len(terms)):
        yield Expr.from_terms(expr.spec, dict(terms[:i] + terms[i + 1:]))


def _shrink_operator(op: LinearDiffOp) -> Iterator[LinearDiffOp]:
    items = op.sorted_coeffs()
    for i in range(len(items)):
        yield op.with_coeffs(dict(items[:i] + items[i + 1:]))
    for i, (key, value) in enumerate(items):
        for smaller in _shrink_expr(value):
            if not smaller.is_zero():
                yield op.with_coeffs(dict(items[:i] + [(key, smaller)] + items[i + 1:]))


def _shrink_current(current: CurrentVector) -> Iterator[CurrentVector]:
    components = list(current.components)
    for i, value in enumerate(components):
        for smaller in _shrink_expr(value):
            yield CurrentVector(tuple(components[:i] + [smaller] + components[i + 1:]))


def _shrink_part(part: Part) -> Iterator[Part]:
    if isinstance(part, LinearDiffOp):
        return _shrink_operator(part)
    if isinstance(part, CurrentVector):
        return _shrink_current(part)
    if part.is_constant():
        return iter(())
    return _shrink_expr(part)


def _fails(suite: PropertySuite, parts: tuple[Part, ...], eta: Eta) -> bool:
    try:
        return not suite.holds(parts, eta)
    except NoetherError:
        return True


def minimize(suite: PropertySuite, parts: tuple[Part, ...], eta: Eta) -> tuple[Part, ...]:
    """Greedy shrink: keep any one-step smaller case that still fails."""
    current = parts
    improved = True
    while improved:
        improved = False
        for i, part in enumerate(current):
            for smaller in _shrink_part(part):
                candidate = current[:i] + (smaller,) + current[i + 1:]
                if _fails(suite, candidate, eta):
                    current = candidate
                    improved = True
                    break
            if improved:
                break
    return current


def describe_part(part: Part) -> Any:
    """JSON-ready view of one case part."""
    if isinstance(part, LinearDiffOp):
        data = part.to_dict()
        data.pop("bundle")
        return data
    if isinstance(part, CurrentVector):
        return [format_expr(c) for c in part.components]
    return format_expr(part)


# runs


@dataclass
class PropertyFailure:
    trial: int
    seed: int
    bundle: dict[str, Any]
    counterexample: list[Any]


@dataclass
class PropertyRun:
    """Outcome of one suite run; only the first failure is kept."""

    suite: str
    trials: int
    seed: int
    passed: int = 0
    failure: Optional[PropertyFailure] = None
    detail: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failure is None

    def to_check(self) -> CheckResult:
        detail = {"trials": self.trials, "seed": self.seed, "passed": self.passed}
        if self.failure is None:
            return CheckResult.passed(self.suite, **detail)
        detail.update(
            failing_trial=self.failure.trial,
            failing_seed=self.failure.seed,
            bundle=self.failure.bundle,
            counterexample=self.failure.counterexample,
        )
        return CheckResult.failed(
            self.suite, json.dumps(self.failure.counterexample, sort_keys=True), **detail
        )

    def to_report(self) -> VerificationReport:
        report = VerificationReport(f"property:{self.suite}")
        report.add(self.to_check())
        return report


def trial_seed(seed: int, trial: int) -> int:
    return seed * 1_000_003 + trial


def run_property(
    name: str,
    trials: int = 100,
    seed: int = 0,
    profile: Optional[PropertyProfile] = None,
    eta: Eta = adjoint_eta,
) -> PropertyRun:
    """Run ``trials`` cases of a suite; stops at the first failure and shrinks it.

    Args:
        name: Suite name, a key of SUITES
        trials: Number of random cases
        seed: Run seed; trial t uses seed * 1000003 + t
        profile: Size bounds of the cases
        eta: Adjoint under test, replaceable to inject a faulty one

    Raises:
        KeyError: Unknown suite
    """
    if name not in SUITES:
        available = ", ".join(SUITES)
        raise KeyError(f"Unknown property suite: '{name}'. Available suites: {available}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    suite = SUITES[name]
    profile = profile or PropertyProfile()
    run = PropertyRun(name, trials, seed)
    for trial in range(trials):
        case_seed = trial_seed(seed, trial)
        rng = random.Random(case_seed)
        spec = random_bundle(rng, profile)
        parts = suite.draw(spec, rng, profile)
        if not _fails(suite, parts, eta):
            run.passed += 1
            continue
        _logger.warning(f"{name}: trial {trial} (seed {case_seed}) fails, shrinking")
        smallest = minimize(suite, parts, eta)
        run.failure = PropertyFailure(
            trial, case_seed, spec.to_dict(), [describe_part(p) for p in smallest]
        )
        break
    _logger.info(f"{name}: {run.passed}/{trials} trials passed")
    return run
