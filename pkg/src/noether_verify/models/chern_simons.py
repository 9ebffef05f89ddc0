"""Chern-Simons gauge model in three dimensions.

Structure group with c^r_pq = eps_rpq and identity Killing form. Field
a^r_l is family ``a[r,l]``; ``a[r,l;(m)]`` is d_m a^r_l. Parameters are
xi^r and tau^m, plus xi_p^r for the split form of the symmetry.
"""

from fractions import Fraction

from ..algebra.bundle import BundleSpec, CoordId, FamilyRole, FieldFamily, with_duals
from ..algebra.expr import Density, Expr
from ..algebra.indices import EMPTY
from ..calculus.operators import LinearDiffOp, OperatorRole, operator_from_images
from ..calculus.variational import total_derivative
from ..theory.noether import OnShellWitness
from ..utils.logger import get_logger
from .base import Model, ModelBuilder
from .forms import levi_civita

_logger = get_logger("models.chern_simons")

DIM = 3
RANK = 3

CS_CHECKS = (
    "gauge-symmetry",
    "noether-identity",
    "noether-xi-rows",
    "noether-tau-rows",
    "tau-rows-displayed",
    "fe-witness",
    "eta-roundtrip",
    "splitting-variant",
    "splitting-reparameterization",
    "first-variation",
    "theorem-equivalence",
)


def cs_spec() -> BundleSpec:
    families = [
        FieldFamily("a", FamilyRole.FIELD, (RANK, DIM)),
        FieldFamily("xi", FamilyRole.PARAMETER, (RANK,)),
        FieldFamily("tau", FamilyRole.PARAMETER, (DIM,)),
        FieldFamily("xi_p", FamilyRole.PARAMETER, (RANK,)),
    ]
    return BundleSpec(DIM, tuple(with_duals(families)))


def structure_constant(r: int, p: int, q: int) -> int:
    return levi_civita((r, p, q))


class ChernSimonsTerms:
    """Building blocks over one BundleSpec."""

    def __init__(self, spec: BundleSpec):
        self.spec = spec

    def a(self, r: int, lam: int, *jet: int) -> Expr:
        return Expr.coordinate(self.spec, "a", (r, lam), jet)

    def param(self, family: str, index: int, *jet: int) -> Expr:
        return Expr.coordinate(self.spec, family, (index,), jet)

    def bracket(self, r: int, first, second) -> Expr:
        """c^r_pq first(p) second(q) for callables giving the p-th and q-th factors."""
        total = Expr.zero(self.spec)
        for p in range(RANK):
            for q in range(RANK):
                c = structure_constant(r, p, q)
                if c:
                    total = total + first(p) * second(q) * c
        return total

    def curvature(self, r: int, lam: int, mu: int) -> Expr:
        """F^r_lm = d_l a^r_m - d_m a^r_l + c^r_pq a^p_l a^q_m."""
        return (
            self.a(r, mu, lam)
            - self.a(r, lam, mu)
            + self.bracket(r, lambda p: self.a(p, lam), lambda q: self.a(q, mu))
        )

    def lagrangian(self) -> Expr:
        """1/2 eps^{abg} a^m_a (F^m_bg - 1/3 c^m_pq a^p_b a^q_g)."""
        total = Expr.zero(self.spec)
        for alpha in range(DIM):
            for beta in range(DIM):
                for gamma in range(DIM):
                    sign = levi_civita((alpha, beta, gamma))
                    if not sign:
                        continue
                    for m in range(RANK):
                        cubic = self.bracket(m, lambda p: self.a(p, beta), lambda q: self.a(q, gamma))
                        inner = self.curvature(m, beta, gamma) - cubic.scale(Fraction(1, 3))
                        total = total + (self.a(m, alpha) * inner).scale(Fraction(sign, 2))
        return total

    def symmetry_images(self) -> dict[CoordId, Expr]:
        """c^r_pq a^p_l xi^q + xi^r_l - a^r_m tau^m_l - tau^m a^r_(l;m)."""
        images = {}
        for r in range(RANK):
            for lam in range(DIM):
                value = self.bracket(r, lambda p: self.a(p, lam), lambda q: self.param("xi", q))
                value = value + self.param("xi", r, lam)
                for mu in range(DIM):
                    value = value - self.a(r, mu) * self.param("tau", mu, lam)
                    value = value - self.param("tau", mu) * self.a(r, lam, mu)
                images[CoordId("a", (r, lam))] = value
        return images

    def split_images(self) -> dict[CoordId, Expr]:
        """c^r_pq a^p_l xi_p^q + xi_p^r_l + tau^m F^r_lm."""
        images = {}
        for r in range(RANK):
            for lam in range(DIM):
                value = self.bracket(r, lambda p: self.a(p, lam), lambda q: self.param("xi_p", q))
                value = value + self.param("xi_p", r, lam)
                for mu in range(DIM):
                    value = value + self.param("tau", mu) * self.curvature(r, lam, mu)
                images[CoordId("a", (r, lam))] = value
        return images

    def reparameterization_images(self) -> dict[CoordId, Expr]:
        """xi_p^r = xi^r - tau^l a^r_l; tau is kept."""
        images = {}
        for r in range(RANK):
            value = self.param("xi", r)
            for lam in range(DIM):
                value = value - self.param("tau", lam) * self.a(r, lam)
            images[CoordId("xi_p", (r,))] = value
        for mu in range(DIM):
            images[CoordId("tau", (mu,))] = self.param("tau", mu)
        return images

    def fe_witness(self, mu: int) -> OnShellWitness:
        """Cofactors F^r_lm for the row F^r_lm E^l_r."""
        return OnShellWitness(
            {(CoordId("a", (r, lam)), EMPTY): self.curvature(r, lam, mu) for r in range(RANK) for lam in range(DIM)}
        )

    def fe_row(self, mu: int, el: dict[CoordId, Expr]) -> Expr:
        total = Expr.zero(self.spec)
        for r in range(RANK):
            for lam in range(DIM):
                total = total + self.curvature(r, lam, mu) * el[CoordId("a", (r, lam))]
        return total

    def displayed_xi_row(self, q: int, el: dict[CoordId, Expr]) -> Expr:
        """c^r_pq a^p_l E^l_r - d_l E^l_q as the identity is usually written."""
        total = Expr.zero(self.spec)
        for lam in range(DIM):
            total = total + self.bracket_row(q, lam, el)
            total = total - total_derivative(el[CoordId("a", (q, lam))], lam)
        return total

    def bracket_row(self, q: int, lam: int, el: dict[CoordId, Expr]) -> Expr:
        total = Expr.zero(self.spec)
        for r in range(RANK):
            for p in range(RANK):
                c = structure_constant(r, p, q)
                if c:
                    total = total + self.a(p, lam) * el[CoordId("a", (r, lam))] * c
        return total

    def displayed_tau_row(self, mu: int, el: dict[CoordId, Expr]) -> Expr:
        """-a^r_(l;m) E^l_r + d_l(a^r_m E^l_r)."""
        total = Expr.zero(self.spec)
        for r in range(RANK):
            for lam in range(DIM):
                e = el[CoordId("a", (r, lam))]
                total = total - self.a(r, lam, mu) * e
                total = total + total_derivative(self.a(r, mu) * e, lam)
        return total


def build_chern_simons(scale: int | Fraction = 1) -> Model:
    """Chern-Simons model; ``scale`` multiplies the Lagrangian."""
    spec = cs_spec()
    terms = ChernSimonsTerms(spec)
    lagrangian = Density(terms.lagrangian().scale(scale))
    upsilon = operator_from_images(spec, ("xi", "tau"), ("a",), terms.symmetry_images())
    _logger.info(
        f"Built Chern-Simons model: {len(lagrangian.coeff)} Lagrangian terms, "
        f"{len(upsilon.coeffs)} symmetry coefficients"
    )
    return Model(
        name="cs" if scale == 1 else f"cs*{scale}",
        spec=spec,
        lagrangian=lagrangian,
        gauge_symmetry=upsilon,
        expected_checks=CS_CHECKS,
        notes=("local term of the Chern-Simons Lagrangian only",),
    )


def cs_splitting_variant(model: Model) -> LinearDiffOp:
    """The symmetry in parameters (xi_p, tau) with the curvature term."""
    terms = ChernSimonsTerms(model.spec)
    return operator_from_images(model.spec, ("xi_p", "tau"), ("a",), terms.split_images())


def cs_reparameterization(model: Model) -> LinearDiffOp:
    """h: (xi, tau) -> (xi_p, tau) with xi_p = xi - tau^l a_l."""
    terms = ChernSimonsTerms(model.spec)
    return operator_from_images(
        model.spec, ("xi", "tau"), ("xi_p", "tau"), terms.reparameterization_images(), OperatorRole.GENERIC
    )


def cs_variant_witnesses(model: Model) -> dict[CoordId, OnShellWitness]:
    """Witnesses for the tau rows of the split symmetry's Noether identity."""
    terms = ChernSimonsTerms(model.spec)
    return {model.spec.dual(CoordId("tau", (mu,))): terms.fe_witness(mu) for mu in range(DIM)}


class ChernSimonsBuilder(ModelBuilder):
    """Builder for ``cs``."""

    def __init__(self, scale: int | Fraction = 1):
        self.scale = scale

    @property
    def name(self) -> str:
        return "cs"

    def build(self) -> Model:
        return build_chern_simons(self.scale)
