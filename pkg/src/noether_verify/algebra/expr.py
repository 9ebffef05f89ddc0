"""Canonical exact-rational polynomials in base coordinates and jet variables.

An ``Expr`` is a sparse map from monomials to nonzero ``Fraction``
coefficients. A monomial is a tuple of ``(JetVariable, exponent)`` pairs
sorted by the variables' natural tuple order, so equal polynomials have
equal term maps.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Union

from ..errors import BundleMismatchError, UnboundVariableError
from .bundle import BundleSpec, CoordId, FamilyRole
from .indices import EMPTY, SymMultiIndex


class JetVariable(NamedTuple):
    """Jet coordinate y^i_L; an empty jet is the fiber coordinate itself."""

    coord: CoordId
    jet: SymMultiIndex = EMPTY

    @property
    def family(self) -> str:
        return self.coord.family

    @property
    def component(self) -> tuple[int, ...]:
        return self.coord.component

    def prolong(self, index: int) -> "JetVariable":
        """The variable y^i_{index+L}."""
        return JetVariable(self.coord, self.jet.add_index(index))

    def __str__(self) -> str:
        from .parser import format_variable

        return format_variable(self)


Monomial = tuple[tuple[JetVariable, int], ...]
Scalar = Union[int, Fraction]
ONE: Monomial = ()


def mono_mul(first: Monomial, second: Monomial) -> Monomial:
    """Product of two canonical monomials."""
    if not first:
        return second
    if not second:
        return first
    merged = dict(first)
    for var, exp in second:
        merged[var] = merged.get(var, 0) + exp
    return tuple(sorted(merged.items()))


def mono_degree(mono: Monomial) -> int:
    return sum(exp for _, exp in mono)


def mono_without(mono: Monomial, var: JetVariable) -> tuple[int, Monomial]:
    """Split off one power of ``var``: returns (old exponent, remaining monomial)."""
    for pos, (v, exp) in enumerate(mono):
        if v == var:
            if exp == 1:
                return exp, mono[:pos] + mono[pos + 1:]
            return exp, mono[:pos] + ((v, exp - 1),) + mono[pos + 1:]
    return 0, mono


def variable_key(spec: BundleSpec, var: JetVariable) -> tuple:
    """Printing order of variables: family declaration, component, jet."""
    return (spec.rank(var.family), var.component, len(var.jet), tuple(var.jet))


def monomial_key(spec: BundleSpec, mono: Monomial) -> tuple:
    """Graded lexicographic monomial order."""
    return (
        mono_degree(mono),
        tuple(sorted((variable_key(spec, v), e) for v, e in mono)),
    )


class Expr:
    """Immutable polynomial with exact rational coefficients over a BundleSpec."""

    __slots__ = ("spec", "_terms", "_hash")

    def __init__(self, spec: BundleSpec, terms: Mapping[Monomial, Fraction] | None = None):
        """Wrap an already canonical term map (no zero coefficients).

        Use ``Expr.from_terms`` for maps that may contain zeros.
        """
        self.spec = spec
        self._terms: dict[Monomial, Fraction] = dict(terms) if terms else {}
        self._hash: int | None = None

    # construction

    @classmethod
    def from_terms(cls, spec: BundleSpec, terms: Mapping[Monomial, Scalar]) -> "Expr":
        """Build from canonical monomials, dropping zero coefficients."""
        return cls(spec, {m: Fraction(c) for m, c in terms.items() if c != 0})

    @classmethod
    def zero(cls, spec: BundleSpec) -> "Expr":
        return cls(spec)

    @classmethod
    def constant(cls, spec: BundleSpec, value: Scalar) -> "Expr":
        value = Fraction(value)
        return cls(spec, {ONE: value} if value else None)

    @classmethod
    def variable(cls, spec: BundleSpec, var: JetVariable) -> "Expr":
        return cls(spec, {((var, 1),): Fraction(1)})

    @classmethod
    def coordinate(
        cls,
        spec: BundleSpec,
        family: str,
        indices: Iterable[int] = (),
        jet: Iterable[int] = (),
    ) -> "Expr":
        """The jet variable ``family[indices; jet]``, antisymmetric sign absorbed.

        A repeated antisymmetric index gives the zero expression.
        """
        resolved = spec.resolve(family, indices)
        if resolved is None:
            return cls(spec)
        coord, sign = resolved
        if spec.family(family).role is FamilyRole.BASE and tuple(jet):
            raise ValueError("Base coordinates carry no jet")
        return cls(spec, {((JetVariable(coord, SymMultiIndex(jet)), 1),): Fraction(sign)})

    # inspection

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ONE in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get(ONE, Fraction(0))

    def variables(self) -> set[JetVariable]:
        return {v for mono in self._terms for v, _ in mono}

    def families(self) -> set[str]:
        return {v.family for v in self.variables()}

    def jet_order(self) -> int:
        """Max |L| over occurring jet variables; 0 for constants."""
        return max((len(v.jet) for v in self.variables()), default=0)

    def degree(self) -> int:
        return max((mono_degree(m) for m in self._terms), default=0)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in the fixed graded lexicographic order."""
        return sorted(self._terms.items(), key=lambda item: monomial_key(self.spec, item[0]))

    # arithmetic

    def _coerce(self, other: Union["Expr", Scalar]) -> "Expr":
        if isinstance(other, Expr):
            if other.spec is not self.spec and other.spec != self.spec:
                raise BundleMismatchError("Expressions live over different BundleSpecs")
            return other
        if isinstance(other, (int, Rational)):
            return Expr.constant(self.spec, other)
        return NotImplemented

    def __add__(self, other: Union["Expr", Scalar]) -> "Expr":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        terms = dict(self._terms)
        for mono, coeff in other._terms.items():
            total = terms.get(mono, 0) + coeff
            if total:
                terms[mono] = total
            else:
                terms.pop(mono, None)
        return Expr(self.spec, terms)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(self.spec, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Union["Expr", Scalar]) -> "Expr":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "Expr":
        return (-self) + other

    def scale(self, factor: Scalar) -> "Expr":
        """Multiply by a rational constant."""
        factor = Fraction(factor)
        if not factor:
            return Expr(self.spec)
        return Expr(self.spec, {m: c * factor for m, c in self._terms.items()})

    def __mul__(self, other: Union["Expr", Scalar]) -> "Expr":
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._terms or not other._terms:
            return Expr(self.spec)
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = mono_mul(m1, m2)
                terms[mono] = terms.get(mono, 0) + c1 * c2
        return Expr.from_terms(self.spec, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Expr":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"Exponent must be a non-negative integer, got {exponent}")
        result = Expr.constant(self.spec, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Expr):
            return self._terms == other._terms and (other.spec is self.spec or other.spec == self.spec)
        if isinstance(other, (int, Rational)):
            return self._terms == Expr.constant(self.spec, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # calculus and evaluation

    def partial(self, var: JetVariable) -> "Expr":
        """Formal partial derivative; distinct jet variables are independent."""
        terms: dict[Monomial, Fraction] = {}
        for mono, coeff in self._terms.items():
            exp, rest = mono_without(mono, var)
            if exp:
                terms[rest] = terms.get(rest, 0) + coeff * exp
        return Expr.from_terms(self.spec, terms)

    def substitute(self, bindings: Mapping[JetVariable, "Expr"]) -> "Expr":
        """Simultaneous substitution of the bound variables; others are kept."""
        result = Expr(self.spec)
        for mono, coeff in self._terms.items():
            factor = Expr.constant(self.spec, coeff)
            kept: list[tuple[JetVariable, int]] = []
            for var, exp in mono:
                if var in bindings:
                    factor = factor * (self._coerce(bindings[var]) ** exp)
                else:
                    kept.append((var, exp))
            result = result + factor * Expr(self.spec, {tuple(kept): Fraction(1)})
        return result

    def eval_at(self, point: Mapping[JetVariable, Scalar]) -> Fraction:
        """Exact rational value at ``point``.

        Raises:
            UnboundVariableError: If a variable of the expression is unbound
        """
        total = Fraction(0)
        for mono, coeff in self._terms.items():
            value = coeff
            for var, exp in mono:
                if var not in point:
                    raise UnboundVariableError(f"No value for variable {var}")
                value *= Fraction(point[var]) ** exp
            total += value
        return total

    def __str__(self) -> str:
        from .parser import format_expr

        return format_expr(self)

    def __repr__(self) -> str:
        return f"Expr({self})"


@dataclass(frozen=True)
class Density:
    """Horizontal n-form L omega, stored as its coefficient L."""

    coeff: Expr

    @property
    def spec(self) -> BundleSpec:
        return self.coeff.spec

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def jet_order(self) -> int:
        return self.coeff.jet_order()

    def __add__(self, other: "Density") -> "Density":
        return Density(self.coeff + other.coeff)

    def __sub__(self, other: "Density") -> "Density":
        return Density(self.coeff - other.coeff)

    def scale(self, factor: Scalar) -> "Density":
        return Density(self.coeff.scale(factor))

    def __str__(self) -> str:
        return str(self.coeff)
