"""Topological BF model L = A wedge d_H B with p + q = n - 1.

A is a p-form and B a q-form; the gauge symmetry is
delta A = d_H eps, delta B = d_H xi with eps a (p-1)-form and xi a
(q-1)-form. It is reducible: each parameter form is itself shifted by
d_H of a form one degree lower. Stage k of the chain carries an eps-form
of degree p-k-2 and a xi-form of degree q-k-2; negative degrees are
dropped, the degree-0 eps-form is the scalar ``alpha``, and the chain
ends once both degrees are negative.

With A = sum over increasing I of A_I dx^I (the 1/p! normalization of
antisymmetric components) the density is

    L = sum over I, nu, J of sgn(I, nu, J) A_I d_nu B_J,

and the Euler-Lagrange expressions are, with K the complement of I or J,

    E(A_I) = sgn(I, K) (d_H B)_K,
    E(B_J) = -(-1)^p sgn(K, J) (d_H A)_K.
"""

from dataclasses import dataclass
from typing import Optional

from ..algebra.bundle import BundleSpec, CoordId, FamilyRole, FieldFamily, with_duals
from ..algebra.expr import Expr
from ..calculus.operators import LinearDiffOp, OperatorRole, operator_from_images
from ..errors import ModelParameterError
from ..theory.chains import ReducibilityChain
from ..utils.logger import get_logger
from .base import Model, ModelBuilder
from .forms import HorizontalForm, complement, current_of, d_h, levi_civita, top_density, wedge

_logger = get_logger("models.bf")

BF_CHECKS = (
    "gauge-symmetry",
    "noether-eps-rows",
    "noether-xi-rows",
    "euler-lagrange-components",
    "sigma-identity",
    "noether-current",
    "chain",
    "dual-chain",
    "eta-roundtrip",
    "theorem-equivalence",
)


@dataclass(frozen=True)
class ChainStage:
    """Families of stage k: (name, degree) of the eps- and xi-forms, if present."""

    index: int
    eps: Optional[tuple[str, int]]
    xi: Optional[tuple[str, int]]

    @property
    def families(self) -> tuple[str, ...]:
        return tuple(part[0] for part in (self.eps, self.xi) if part is not None)


def validate_bf(n: int, p: int, q: int) -> None:
    if p < 1 or q < 1:
        raise ModelParameterError(f"BF model needs p >= 1 and q >= 1, got p={p}, q={q}")
    if p + q != n - 1:
        raise ModelParameterError(f"BF model needs p + q = n - 1, got n={n}, p={p}, q={q}")


def chain_stages(p: int, q: int) -> list[ChainStage]:
    """Stage families under the degree-dropping rule."""
    stages = []
    k = 0
    while p - k - 2 >= 0 or q - k - 2 >= 0:
        eps_degree, xi_degree = p - k - 2, q - k - 2
        eps = None
        if eps_degree >= 0:
            eps = ("alpha" if eps_degree == 0 else f"eps{k}", eps_degree)
        xi = (f"xi{k}", xi_degree) if xi_degree >= 0 else None
        stages.append(ChainStage(k, eps, xi))
        k += 1
    return stages


def bf_spec(n: int, p: int, q: int) -> BundleSpec:
    def form(name: str, role: FamilyRole, degree: int) -> FieldFamily:
        return FieldFamily(name, role, (n,) * degree, antisym=True)

    families = [
        form("A", FamilyRole.FIELD, p),
        form("B", FamilyRole.FIELD, q),
        form("eps", FamilyRole.PARAMETER, p - 1),
        form("xi", FamilyRole.PARAMETER, q - 1),
    ]
    for stage in chain_stages(p, q):
        for part in (stage.eps, stage.xi):
            if part is not None:
                families.append(form(part[0], FamilyRole.PARAMETER, part[1]))
    return BundleSpec(n, tuple(with_duals(families)))


def _images(spec: BundleSpec, pairs: list[tuple[str, Optional[str]]]) -> dict[CoordId, Expr]:
    """Components of d_H(source form) for every (target, source) pair; zero without a source."""
    images: dict[CoordId, Expr] = {}
    for target, source in pairs:
        derived = d_h(HorizontalForm.of_family(spec, source)) if source is not None else None
        for coord in spec.coords(target):
            images[coord] = derived.component(coord.component) if derived is not None else Expr.zero(spec)
    return images


def build_bf_chain(n: int, p: int, q: int, spec: Optional[BundleSpec] = None) -> ReducibilityChain:
    """Stages upsilon^k: eps-form -> d_H eps-form, xi-form -> d_H xi-form."""
    validate_bf(n, p, q)
    spec = spec or bf_spec(n, p, q)
    previous = ChainStage(-1, ("eps", p - 1), ("xi", q - 1))
    stages: list[LinearDiffOp] = []
    for stage in chain_stages(p, q):
        pairs = [
            (part[0], nxt[0] if nxt else None)
            for part, nxt in ((previous.eps, stage.eps), (previous.xi, stage.xi))
            if part is not None
        ]
        op = operator_from_images(
            spec, stage.families, previous.families, _images(spec, pairs), OperatorRole.CHAIN_STAGE
        )
        stages.append(op)
        previous = stage
    return ReducibilityChain(tuple(stages))


def expected_euler_lagrange(spec: BundleSpec, p: int, q: int) -> dict[CoordId, Expr]:
    """Signed components of d_H B and d_H A the Euler-Lagrange expressions must equal."""
    n = spec.base_dim
    dA = d_h(HorizontalForm.of_family(spec, "A"))
    dB = d_h(HorizontalForm.of_family(spec, "B"))
    expected: dict[CoordId, Expr] = {}
    for coord in spec.coords("A"):
        rest = complement(coord.component, n)
        expected[coord] = dB.component(rest).scale(levi_civita(coord.component + rest))
    sign_p = -1 if p % 2 else 1
    for coord in spec.coords("B"):
        rest = complement(coord.component, n)
        expected[coord] = dA.component(rest).scale(-sign_p * levi_civita(rest + coord.component))
    return expected


def build_bf(n: int, p: int, q: int) -> Model:
    """BF model for one (n, p, q).

    Raises:
        ModelParameterError: p or q below 1, or p + q != n - 1
    """
    validate_bf(n, p, q)
    spec = bf_spec(n, p, q)
    A = HorizontalForm.of_family(spec, "A")
    B = HorizontalForm.of_family(spec, "B")
    eps = HorizontalForm.of_family(spec, "eps")
    lagrangian = top_density(wedge(A, d_h(B)))
    upsilon = operator_from_images(
        spec, ("eps", "xi"), ("A", "B"), _images(spec, [("A", "eps"), ("B", "xi")])
    )
    sigma = current_of(wedge(eps, d_h(B)))
    chain = build_bf_chain(n, p, q, spec)
    _logger.info(
        f"Built BF model ({n},{p},{q}): {len(lagrangian.coeff)} Lagrangian terms, {len(chain)} chain stages"
    )
    return Model(
        name=f"bf:{n}:{p}:{q}",
        spec=spec,
        lagrangian=lagrangian,
        gauge_symmetry=upsilon,
        sigma=sigma,
        chain=chain,
        expected_checks=BF_CHECKS,
        notes=(f"chain length {len(chain)} under the degree-dropping rule",),
    )


class BFBuilder(ModelBuilder):
    """Builder for ``bf:<n>:<p>:<q>``."""

    def __init__(self, n: int, p: int, q: int):
        validate_bf(n, p, q)
        self.n, self.p, self.q = n, p, q

    @property
    def name(self) -> str:
        return f"bf:{self.n}:{self.p}:{self.q}"

    def build(self) -> Model:
        return build_bf(self.n, self.p, self.q)
