"""Horizontal exterior forms in components.

A p-form is stored by its components on strictly increasing index tuples,
alpha = sum over increasing I of alpha_I dx^I, which is the 1/p!
normalization with antisymmetric alpha_{mu1...mup}. Wedge products and
d_H pick up the Levi-Civita sign of the sorting permutation.

Densities and currents come out of top and next-to-top forms:
  * an n-form Phi gives the density Phi_(0,...,n-1);
  * an (n-1)-form Phi gives the current J^l = (-1)^l Phi_K(l), with K(l)
    the increasing tuple that omits l, since dx^K(l) = (-1)^l omega_l.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

from ..algebra.bundle import BundleSpec
from ..algebra.expr import Density, Expr
from ..algebra.indices import canonicalize_antisym
from ..calculus.variational import CurrentVector, total_derivative

Component = tuple[int, ...]


def levi_civita(indices: Iterable[int]) -> int:
    """Sign of the permutation sorting ``indices``; 0 on a repeated index."""
    canonical = canonicalize_antisym(indices)
    return 0 if canonical is None else canonical[1]


def complement(indices: Iterable[int], base_dim: int) -> Component:
    """Increasing tuple of the base indices not in ``indices``."""
    taken = set(indices)
    return tuple(i for i in range(base_dim) if i not in taken)


@dataclass(frozen=True)
class HorizontalForm:
    """Horizontal p-form with Expr components on increasing index tuples."""

    spec: BundleSpec
    degree: int
    components: Mapping[Component, Expr] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0 <= self.degree <= self.spec.base_dim:
            raise ValueError(f"Form degree {self.degree} outside 0..{self.spec.base_dim}")
        for key in self.components:
            if len(key) != self.degree or list(key) != sorted(set(key)):
                raise ValueError(f"Component {key} is not an increasing {self.degree}-tuple")

    @classmethod
    def of_family(cls, spec: BundleSpec, family: str, jet: Iterable[int] = ()) -> "HorizontalForm":
        """The form whose components are the (jet) variables of an antisymmetric family."""
        fam = spec.family(family)
        jet = tuple(jet)
        return cls(
            spec,
            len(fam.shape),
            {c: Expr.coordinate(spec, family, c, jet) for c in fam.components()},
        )

    def component(self, indices: Iterable[int]) -> Expr:
        """Component on any index order, with the permutation sign."""
        items = tuple(indices)
        canonical = canonicalize_antisym(items)
        if canonical is None:
            return Expr.zero(self.spec)
        key, sign = canonical
        value = self.components.get(key)
        return value.scale(sign) if value is not None else Expr.zero(self.spec)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.components.values())

    def __add__(self, other: "HorizontalForm") -> "HorizontalForm":
        if other.degree != self.degree:
            raise ValueError("Cannot add forms of different degree")
        merged = dict(self.components)
        for key, value in other.components.items():
            merged[key] = merged[key] + value if key in merged else value
        return HorizontalForm(self.spec, self.degree, merged)

    def scale(self, factor: int) -> "HorizontalForm":
        return HorizontalForm(self.spec, self.degree, {k: v.scale(factor) for k, v in self.components.items()})


def _accumulate(target: dict[Component, Expr], indices: Component, value: Expr) -> None:
    canonical = canonicalize_antisym(indices)
    if canonical is None or value.is_zero():
        return
    key, sign = canonical
    term = value.scale(sign)
    target[key] = target[key] + term if key in target else term


def wedge(first: HorizontalForm, second: HorizontalForm) -> HorizontalForm:
    """first wedge second."""
    degree = first.degree + second.degree
    if degree > first.spec.base_dim:
        return HorizontalForm(first.spec, first.spec.base_dim)
    result: dict[Component, Expr] = {}
    for i, a in first.components.items():
        for j, b in second.components.items():
            _accumulate(result, i + j, a * b)
    return HorizontalForm(first.spec, degree, result)


def d_h(form: HorizontalForm) -> HorizontalForm:
    """Horizontal differential: sum over nu and I of d_nu alpha_I dx^nu wedge dx^I."""
    spec = form.spec
    if form.degree == spec.base_dim:
        return HorizontalForm(spec, spec.base_dim)
    result: dict[Component, Expr] = {}
    for key, value in form.components.items():
        for nu in range(spec.base_dim):
            if nu not in key:
                _accumulate(result, (nu,) + key, total_derivative(value, nu))
    return HorizontalForm(spec, form.degree + 1, result)


def top_density(form: HorizontalForm) -> Density:
    """Coefficient of an n-form against dx^0 wedge ... wedge dx^(n-1)."""
    n = form.spec.base_dim
    if form.degree != n:
        raise ValueError(f"Expected an {n}-form, got degree {form.degree}")
    return Density(form.component(tuple(range(n))))


def current_of(form: HorizontalForm) -> CurrentVector:
    """Current J^l = (-1)^l Phi_K(l) of an (n-1)-form Phi."""
    n = form.spec.base_dim
    if form.degree != n - 1:
        raise ValueError(f"Expected an {n - 1}-form, got degree {form.degree}")
    return CurrentVector(
        tuple(form.component(complement((l,), n)).scale(-1 if l % 2 else 1) for l in range(n))
    )


def increasing_tuples(base_dim: int, degree: int) -> list[Component]:
    return list(combinations(range(base_dim), degree))
