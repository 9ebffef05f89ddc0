"""Total derivatives, Euler-Lagrange operator and Noether currents.

Everything here acts on functions (``Expr``), densities and currents; the
d_H-exactness test is "all variational derivatives vanish", which is exact
for the polynomial densities on a single chart handled by this engine.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from ..algebra.bundle import BundleSpec, CoordId, FamilyRole
from ..algebra.expr import Density, Expr, JetVariable, Monomial
from ..algebra.indices import SymMultiIndex, multiindex_key
from ..errors import (
    ConservationError,
    MissingComponentError,
    NotASymmetryError,
    UnboundVariableError,
    UnsupportedOrderError,
)
from ..utils.logger import get_logger

_logger = get_logger("calculus.variational")

EulerLagrange = dict[CoordId, Expr]


def _drop_one(mono: Monomial, pos: int) -> Monomial:
    var, exp = mono[pos]
    if exp == 1:
        return mono[:pos] + mono[pos + 1:]
    return mono[:pos] + ((var, exp - 1),) + mono[pos + 1:]


def _insert(mono: Monomial, var: JetVariable) -> Monomial:
    """Multiply a canonical monomial by one power of ``var``."""
    for pos, (v, exp) in enumerate(mono):
        if v == var:
            return mono[:pos] + ((v, exp + 1),) + mono[pos + 1:]
        if v > var:
            return mono[:pos] + ((var, 1),) + mono[pos:]
    return mono + ((var, 1),)


def total_derivative(expr: Expr, index: int) -> Expr:
    """d_index = d/dx^index + sum over jet variables y_{index+L} d/dy_L.

    Every non-base family is prolonged, parameters and duals included.
    """
    base = expr.spec.base.name
    terms: dict[Monomial, Fraction] = {}
    for mono, coeff in expr.terms.items():
        for pos, (var, exp) in enumerate(mono):
            rest = _drop_one(mono, pos)
            if var.coord.family == base:
                if var.coord.component[0] != index:
                    continue
                new = rest
            else:
                new = _insert(rest, var.prolong(index))
            terms[new] = terms.get(new, 0) + coeff * exp
    return Expr.from_terms(expr.spec, terms)


def iterated_total_derivative(expr: Expr, multi: Iterable[int]) -> Expr:
    """d_L as the composition of single total derivatives."""
    for index in multi:
        if expr.is_zero():
            break
        expr = total_derivative(expr, index)
    return expr


def _coeff(value: Union[Density, Expr]) -> Expr:
    return value.coeff if isinstance(value, Density) else value


def _jets_by_coord(expr: Expr, families: set[str]) -> dict[CoordId, set[SymMultiIndex]]:
    jets: dict[CoordId, set[SymMultiIndex]] = defaultdict(set)
    for var in expr.variables():
        if var.family in families:
            jets[var.coord].add(var.jet)
    return jets


def variational_summands(expr: Expr, coord: CoordId, jets: Iterable[SymMultiIndex]) -> list[Expr]:
    """The signed terms (-1)^|L| d_L(dL/dy_L), one per occurring jet."""
    summands = []
    for jet in sorted(jets, key=multiindex_key):
        term = iterated_total_derivative(expr.partial(JetVariable(coord, jet)), jet)
        summands.append(-term if len(jet) % 2 else term)
    return summands


def variational_derivative(expr: Expr, coord: CoordId, jets: Iterable[SymMultiIndex]) -> Expr:
    """sum over L of (-1)^|L| d_L(dL/dy_L) for the given occurring jets."""
    total = Expr.zero(expr.spec)
    for term in variational_summands(expr, coord, jets):
        total = total + term
    return total


def occurring_jets(expr: Union[Density, Expr], families: Iterable[str]) -> dict[CoordId, set[SymMultiIndex]]:
    """Jets at which each coordinate of ``families`` occurs in the expression."""
    return _jets_by_coord(_coeff(expr), set(families))


def euler_lagrange(
    lagrangian: Union[Density, Expr],
    families: Optional[Iterable[str]] = None,
) -> EulerLagrange:
    """Variational derivatives E_i for every independent component of the varied families.

    Args:
        lagrangian: Density (or its coefficient)
        families: Families to vary; defaults to every non-base family

    Returns:
        Map from coordinate to E_i, zero entries included
    """
    expr = _coeff(lagrangian)
    spec = expr.spec
    names = list(families) if families is not None else spec.non_base_families()
    jets = _jets_by_coord(expr, set(names))
    result: EulerLagrange = {}
    for name in names:
        for coord in spec.coords(name):
            result[coord] = variational_derivative(expr, coord, jets.get(coord, ()))
    _logger.debug(f"Euler-Lagrange over {len(names)} families, {len(result)} components")
    return result


def variational_residual(density: Union[Density, Expr]) -> EulerLagrange:
    """Nonzero variational derivatives over all non-base families."""
    expr = _coeff(density)
    jets = _jets_by_coord(expr, set(expr.spec.non_base_families()))
    result: EulerLagrange = {}
    for coord in sorted(jets):
        value = variational_derivative(expr, coord, jets[coord])
        if not value.is_zero():
            result[coord] = value
    return result


def is_variationally_trivial(density: Union[Density, Expr]) -> bool:
    """True iff every variational derivative vanishes, i.e. the density is d_H-exact."""
    return not variational_residual(density)


def substitute_section(
    expr: Expr,
    section: Mapping[CoordId, Expr],
    families: Optional[Iterable[str]] = None,
) -> Expr:
    """Substitute a section given at jet order 0, prolonging it as needed.

    Jet variables y^i_L of the covered families become d_L of the bound
    expression.

    Args:
        expr: Expression to substitute into
        section: Expression for each coordinate of the covered families
        families: Covered families; defaults to the families of ``section``

    Raises:
        UnboundVariableError: A covered family's variable has no binding
    """
    covered = set(families) if families is not None else {c.family for c in section}
    bindings: dict[JetVariable, Expr] = {}
    for var in expr.variables():
        if var.family not in covered:
            continue
        if var.coord not in section:
            raise UnboundVariableError(f"No binding for variable {var}")
        bindings[var] = iterated_total_derivative(section[var.coord], var.jet)
    return expr.substitute(bindings)


@dataclass(frozen=True)
class GeneralizedVectorField:
    """Vertical generalized vector field sum upsilon^i d_i.

    ``families`` are the families the field acts on; components that are
    absent for those families are zero.
    """

    spec: BundleSpec
    families: frozenset[str]
    components: Mapping[CoordId, Expr] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in self.families:
            if self.spec.family(name).role is FamilyRole.BASE:
                raise ValueError("Generalized vector fields are vertical: no base components")
        for coord in self.components:
            if coord.family not in self.families:
                raise ValueError(f"Component {coord} outside the declared families")

    @classmethod
    def from_components(
        cls,
        spec: BundleSpec,
        components: Mapping[CoordId, Expr],
        families: Optional[Iterable[str]] = None,
    ) -> "GeneralizedVectorField":
        names = frozenset(families) if families is not None else frozenset(c.family for c in components)
        return cls(spec, names, {c: e for c, e in components.items() if not e.is_zero()})

    def component(self, coord: CoordId) -> Expr:
        return self.components.get(coord) or Expr.zero(self.spec)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.components.values())


@dataclass(frozen=True)
class CurrentVector:
    """Horizontal (n-1)-form J^l omega_l, one component per base index."""

    components: tuple[Expr, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("A current needs base_dim components")
        spec = self.components[0].spec
        if len(self.components) != spec.base_dim:
            raise ValueError(
                f"Current has {len(self.components)} components, base_dim is {spec.base_dim}"
            )

    @classmethod
    def zero(cls, spec: BundleSpec) -> "CurrentVector":
        return cls(tuple(Expr.zero(spec) for _ in range(spec.base_dim)))

    @property
    def spec(self) -> BundleSpec:
        return self.components[0].spec

    def divergence(self) -> Density:
        """d_H of the current: the density d_l J^l."""
        total = Expr.zero(self.spec)
        for index, component in enumerate(self.components):
            total = total + total_derivative(component, index)
        return Density(total)

    def __add__(self, other: "CurrentVector") -> "CurrentVector":
        return CurrentVector(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "CurrentVector") -> "CurrentVector":
        return CurrentVector(tuple(a - b for a, b in zip(self.components, other.components)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


def _check_covers(expr: Expr, field_: GeneralizedVectorField) -> None:
    for name in expr.families():
        family = expr.spec.family(name)
        if family.role is FamilyRole.FIELD and name not in field_.families:
            raise MissingComponentError(
                f"Vector field has no components for family '{name}' the Lagrangian depends on"
            )


def lie_derive_density(lagrangian: Density, field_: GeneralizedVectorField) -> Density:
    """Action of the vertical contact derivation: sum d_L(upsilon^i) dL/dy^i_L."""
    expr = lagrangian.coeff
    _check_covers(expr, field_)
    prolonged: dict[tuple[CoordId, SymMultiIndex], Expr] = {}
    total = Expr.zero(expr.spec)
    for var in sorted(expr.variables()):
        if var.family not in field_.families:
            continue
        key = (var.coord, var.jet)
        if key not in prolonged:
            prolonged[key] = iterated_total_derivative(field_.component(var.coord), var.jet)
        if prolonged[key].is_zero():
            continue
        total = total + prolonged[key] * expr.partial(var)
    return Density(total)


def contract_euler_lagrange(field_: GeneralizedVectorField, el: Mapping[CoordId, Expr]) -> Expr:
    """upsilon interior delta L: sum upsilon^i E_i."""
    total = Expr.zero(field_.spec)
    for coord, value in field_.components.items():
        if coord in el:
            total = total + value * el[coord]
    return total


def first_variational_residual(lagrangian: Density, field_: GeneralizedVectorField) -> Density:
    """R = L_theta L - upsilon^i E_i; always d_H-exact."""
    lie = lie_derive_density(lagrangian, field_)
    el = euler_lagrange(lagrangian, sorted(field_.families))
    return Density(lie.coeff - contract_euler_lagrange(field_, el))


def noether_current(
    lagrangian: Density,
    field_: GeneralizedVectorField,
    sigma: CurrentVector,
) -> CurrentVector:
    """Noether current J^l = upsilon^i dL/dy^i_l - sigma^l of a first-order Lagrangian.

    Raises:
        UnsupportedOrderError: Lagrangian of jet order 2 or more
        NotASymmetryError: L_theta L differs from d_l sigma^l
        ConservationError: d_l J^l + upsilon^i E_i fails to vanish
    """
    if lagrangian.jet_order() > 1:
        raise UnsupportedOrderError(
            f"Noether currents need a first-order Lagrangian, got order {lagrangian.jet_order()}"
        )
    expr = lagrangian.coeff
    spec = expr.spec
    lie = lie_derive_density(lagrangian, field_)
    mismatch = lie.coeff - sigma.divergence().coeff
    if not mismatch.is_zero():
        raise NotASymmetryError(f"L_theta L - d_l sigma^l = {mismatch}")

    components = []
    for index in range(spec.base_dim):
        value = Expr.zero(spec)
        for coord, upsilon in field_.components.items():
            value = value + upsilon * expr.partial(JetVariable(coord, SymMultiIndex((index,))))
        components.append(value - sigma.components[index])
    current = CurrentVector(tuple(components))

    el = euler_lagrange(lagrangian, sorted(field_.families))
    defect = current.divergence().coeff + contract_euler_lagrange(field_, el)
    if not defect.is_zero():
        raise ConservationError(f"d_l J^l + upsilon E = {defect}")
    _logger.debug("Noether current verified")
    return current
