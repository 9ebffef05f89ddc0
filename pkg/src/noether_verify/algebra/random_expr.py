"""Seeded random polynomials for property checks."""

import random
from dataclasses import dataclass
from fractions import Fraction

from .bundle import BundleSpec, FamilyRole
from .expr import Expr, JetVariable
from .indices import SymMultiIndex


@dataclass(frozen=True)
class ExprProfile:
    """Bounds for ``random_expr``.

    Attributes:
        families: Families variables are drawn from (base family allowed)
        max_jet_order: Largest jet order of a drawn variable
        max_degree: Largest total degree of a term
        max_terms: Largest number of terms drawn
        max_coeff: Largest numerator magnitude
        max_denominator: Largest coefficient denominator
    """

    families: tuple[str, ...]
    max_jet_order: int = 1
    max_degree: int = 2
    max_terms: int = 4
    max_coeff: int = 5
    max_denominator: int = 3

    def __post_init__(self) -> None:
        if min(self.max_jet_order, self.max_degree, self.max_terms) < 0:
            raise ValueError("Profile bounds must be non-negative")
        if self.max_coeff < 1 or self.max_denominator < 1:
            raise ValueError("Coefficient bounds must be positive")


def random_variable(spec: BundleSpec, rng: random.Random, profile: ExprProfile) -> JetVariable:
    """Draw one jet variable within the profile."""
    family = spec.family(rng.choice(profile.families))
    coord = rng.choice(spec.coords(family.name))
    if family.role is FamilyRole.BASE:
        return JetVariable(coord)
    order = rng.randint(0, profile.max_jet_order)
    jet = SymMultiIndex(rng.randrange(spec.base_dim) for _ in range(order))
    return JetVariable(coord, jet)


def random_coefficient(rng: random.Random, profile: ExprProfile) -> Fraction:
    numerator = rng.choice([-1, 1]) * rng.randint(1, profile.max_coeff)
    return Fraction(numerator, rng.randint(1, profile.max_denominator))


def random_expr(spec: BundleSpec, seed: int, profile: ExprProfile) -> Expr:
    """Deterministic random polynomial: same seed and profile give the same Expr."""
    rng = random.Random(seed)
    return random_expr_from(spec, rng, profile)


def random_expr_from(spec: BundleSpec, rng: random.Random, profile: ExprProfile) -> Expr:
    """Random polynomial drawn from an existing generator."""
    result = Expr.zero(spec)
    if not profile.families:
        return Expr.constant(spec, random_coefficient(rng, profile)) if profile.max_terms else result
    for _ in range(rng.randint(1, profile.max_terms) if profile.max_terms else 0):
        term = Expr.constant(spec, random_coefficient(rng, profile))
        for _ in range(rng.randint(0, profile.max_degree)):
            term = term * Expr.variable(spec, random_variable(spec, rng, profile))
        result = result + term
    return result
