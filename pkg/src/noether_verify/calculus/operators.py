"""Linear differential operators between coordinate families.

An operator ``op`` maps a section s of its source families to

    op(s)_a = sum over (r, L) of B(a, r, L) * d_L s_r

with coefficients B stored sparsely by ``(a, r, L)``. The adjoint ``eta``
swaps source and target for their declared dual families.
"""

from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Optional

from ..algebra.bundle import BundleSpec, CoordId, FamilyRole
from ..algebra.expr import Density, Expr, JetVariable, Monomial, mono_without
from ..algebra.indices import EMPTY, SymMultiIndex, leibniz_weight, multiindex_key
from ..algebra.parser import ExpressionParser, format_coordinate, format_expr
from ..errors import BundleMismatchError, MissingComponentError, RoleError
from ..utils.logger import get_logger
from .variational import iterated_total_derivative, variational_derivative

_logger = get_logger("calculus.operators")

CoeffKey = tuple[CoordId, CoordId, SymMultiIndex]

_COEFF_ROLES = (FamilyRole.BASE, FamilyRole.FIELD)


class OperatorRole(Enum):
    """What an operator maps between; checked against family roles."""

    GAUGE_SYMMETRY = "gauge-symmetry"
    NOETHER = "noether"
    CHAIN_STAGE = "chain-stage"
    GENERIC = "generic"

    @property
    def adjoint(self) -> "OperatorRole":
        """Role of eta(op): gauge-symmetry and noether swap, others stay."""
        if self is OperatorRole.GAUGE_SYMMETRY:
            return OperatorRole.NOETHER
        if self is OperatorRole.NOETHER:
            return OperatorRole.GAUGE_SYMMETRY
        return self


# (source roles, target roles) each role accepts
_ROLE_SHAPES: dict[OperatorRole, list[tuple[FamilyRole, FamilyRole]]] = {
    OperatorRole.GAUGE_SYMMETRY: [(FamilyRole.PARAMETER, FamilyRole.FIELD)],
    OperatorRole.NOETHER: [(FamilyRole.DUAL_FIELD, FamilyRole.DUAL_PARAMETER)],
    OperatorRole.CHAIN_STAGE: [
        (FamilyRole.PARAMETER, FamilyRole.PARAMETER),
        (FamilyRole.DUAL_PARAMETER, FamilyRole.DUAL_PARAMETER),
    ],
}


def _roles_of(spec: BundleSpec, names: Iterable[str]) -> set[FamilyRole]:
    return {spec.family(name).role for name in names}


def infer_role(spec: BundleSpec, source: Iterable[str], target: Iterable[str]) -> OperatorRole:
    """The most specific role the family groups allow."""
    src, tgt = _roles_of(spec, source), _roles_of(spec, target)
    for role, shapes in _ROLE_SHAPES.items():
        for src_role, tgt_role in shapes:
            if src == {src_role} and tgt == {tgt_role}:
                return role
    return OperatorRole.GENERIC


def _coord_key(spec: BundleSpec, coord: CoordId) -> tuple:
    return (spec.rank(coord.family), coord.component)


def coeff_sort_key(spec: BundleSpec, key: CoeffKey) -> tuple:
    target, source, jet = key
    return (_coord_key(spec, target), _coord_key(spec, source), multiindex_key(jet))


class LinearDiffOp:
    """Linear differential operator with sparse coefficient table.

    Attributes:
        spec: BundleSpec every family and coefficient lives over
        source: Families of the sections the operator acts on
        target: Families of the output components
        coeffs: Nonzero coefficients keyed by (target coord, source coord, jet)
        role: OperatorRole, validated against the family roles
    """

    __slots__ = ("spec", "source", "target", "role", "_coeffs")

    def __init__(
        self,
        spec: BundleSpec,
        source: Iterable[str],
        target: Iterable[str],
        coeffs: Optional[Mapping[CoeffKey, Expr]] = None,
        role: Optional[OperatorRole] = None,
    ):
        self.spec = spec
        self.source = tuple(source)
        self.target = tuple(target)
        self.role = role if role is not None else infer_role(spec, self.source, self.target)
        self._check_families()
        self._coeffs: dict[CoeffKey, Expr] = {}
        for (a, r, jet), value in (coeffs or {}).items():
            key = (a, r, SymMultiIndex(jet))
            self._check_key(key, value)
            if not value.is_zero():
                self._coeffs[key] = value

    def _check_families(self) -> None:
        for name in self.source + self.target:
            if self.spec.family(name).role is FamilyRole.BASE:
                raise BundleMismatchError("Operators act between non-base families only")
        if self.role is OperatorRole.GENERIC:
            return
        src = _roles_of(self.spec, self.source)
        tgt = _roles_of(self.spec, self.target)
        if not any(src == {s} and tgt == {t} for s, t in _ROLE_SHAPES[self.role]):
            raise RoleError(
                f"Role {self.role.value} does not fit source {self.source} -> target {self.target}"
            )

    def _check_key(self, key: CoeffKey, value: Expr) -> None:
        a, r, _ = key
        if a.family not in self.target or r.family not in self.source:
            raise BundleMismatchError(f"Coefficient key ({a}, {r}) outside the operator's families")
        if value.spec != self.spec:
            raise BundleMismatchError("Coefficient over a different BundleSpec")
        for name in value.families():
            if name in self.source or self.spec.family(name).role not in _COEFF_ROLES:
                raise BundleMismatchError(
                    f"Coefficient at ({format_coordinate(a)}, {format_coordinate(r)}) "
                    f"depends on family '{name}'; only base and dynamic fields are allowed"
                )

    # inspection

    @property
    def coeffs(self) -> Mapping[CoeffKey, Expr]:
        return self._coeffs

    def coeff(self, target: CoordId, source: CoordId, jet: Iterable[int] = ()) -> Expr:
        return self._coeffs.get((target, source, SymMultiIndex(jet))) or Expr.zero(self.spec)

    @property
    def order(self) -> int:
        """Largest |L| with a nonzero coefficient; 0 for the zero operator."""
        return max((len(jet) for _, _, jet in self._coeffs), default=0)

    def is_zero(self) -> bool:
        return not self._coeffs

    def sorted_coeffs(self) -> list[tuple[CoeffKey, Expr]]:
        return sorted(self._coeffs.items(), key=lambda item: coeff_sort_key(self.spec, item[0]))

    def source_coords(self) -> list[CoordId]:
        return self.spec.coords_of(self.source)

    def target_coords(self) -> list[CoordId]:
        return self.spec.coords_of(self.target)

    # arithmetic

    def _same_shape(self, other: "LinearDiffOp") -> None:
        if self.spec != other.spec or set(self.source) != set(other.source) or set(self.target) != set(other.target):
            raise BundleMismatchError("Operators act between different family groups")

    def with_coeffs(self, coeffs: Mapping[CoeffKey, Expr], role: Optional[OperatorRole] = None) -> "LinearDiffOp":
        """Same families and role, new coefficient table."""
        return LinearDiffOp(self.spec, self.source, self.target, coeffs, role or self.role)

    def restrict_target(self, families: Iterable[str]) -> "LinearDiffOp":
        """The rows of the operator landing in ``families``."""
        wanted = set(families)
        keep = tuple(f for f in self.target if f in wanted)
        coeffs = {k: v for k, v in self._coeffs.items() if k[0].family in keep}
        return LinearDiffOp(self.spec, self.source, keep, coeffs, self.role)

    def __add__(self, other: "LinearDiffOp") -> "LinearDiffOp":
        self._same_shape(other)
        merged = dict(self._coeffs)
        for key, value in other._coeffs.items():
            merged[key] = merged[key] + value if key in merged else value
        role = self.role if self.role is other.role else OperatorRole.GENERIC
        return self.with_coeffs(merged, role)

    def __neg__(self) -> "LinearDiffOp":
        return self.scale(-1)

    def __sub__(self, other: "LinearDiffOp") -> "LinearDiffOp":
        return self + (-other)

    def scale(self, factor: int | Fraction) -> "LinearDiffOp":
        return self.with_coeffs({k: v.scale(factor) for k, v in self._coeffs.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearDiffOp):
            return NotImplemented
        return op_equal(self, other)

    def __hash__(self) -> int:
        return hash((self.source, self.target, frozenset(self._coeffs.items())))

    def __repr__(self) -> str:
        return (
            f"LinearDiffOp({self.role.value}, {list(self.source)} -> {list(self.target)}, "
            f"{len(self._coeffs)} coefficients, order {self.order})"
        )

    # constructors

    @classmethod
    def identity(cls, spec: BundleSpec, source: str, target: str) -> "LinearDiffOp":
        """Order-0 operator sending each component of ``source`` to the same component of ``target``."""
        if spec.family(source).shape != spec.family(target).shape:
            raise BundleMismatchError(f"Families '{source}' and '{target}' differ in shape")
        one = Expr.constant(spec, 1)
        coeffs = {
            (CoordId(target, c.component), c, EMPTY): one for c in spec.coords(source)
        }
        return cls(spec, (source,), (target,), coeffs)

    # serialization

    def to_dict(self, max_terms: Optional[int] = None) -> dict[str, Any]:
        """Operator document with the bundle and role embedded."""
        return {
            "bundle": self.spec.to_dict(),
            "role": self.role.value,
            "source": list(self.source),
            "target": list(self.target),
            "coeffs": [
                {
                    "a": format_coordinate(a),
                    "r": format_coordinate(r),
                    "jet": list(jet),
                    "expr": format_expr(value, max_terms),
                }
                for (a, r, jet), value in self.sorted_coeffs()
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], spec: Optional[BundleSpec] = None) -> "LinearDiffOp":
        """Read an operator document.

        Args:
            data: Decoded operator JSON
            spec: BundleSpec to use when the document carries no ``bundle``

        Raises:
            ExpressionSyntaxError: Malformed component or coefficient text
            BundleMismatchError: No bundle available
        """
        if "bundle" in data:
            spec = BundleSpec.from_dict(data["bundle"])
        if spec is None:
            raise BundleMismatchError("Operator document has no 'bundle' and none was given")
        parser = ExpressionParser(spec)
        role = OperatorRole(data["role"]) if data.get("role") else None
        coeffs: dict[CoeffKey, Expr] = {}
        for entry in data.get("coeffs", []):
            target = parser.parse_coordinate(str(entry["a"]))
            source = parser.parse_coordinate(str(entry["r"]))
            if target is None or source is None:
                continue
            (a, sign_a), (r, sign_r) = target, source
            value = parser.parse(str(entry["expr"])).expr.scale(sign_a * sign_r)
            key = (a, r, SymMultiIndex(entry.get("jet", [])))
            coeffs[key] = coeffs[key] + value if key in coeffs else value
        return cls(spec, data["source"], data["target"], coeffs, role)


def op_equal(first: LinearDiffOp, second: LinearDiffOp) -> bool:
    """Whether two operators have the same families and canonical coefficients."""
    if first.spec != second.spec:
        return False
    if set(first.source) != set(second.source) or set(first.target) != set(second.target):
        return False
    return first.coeffs == second.coeffs


def apply_to_section(op: LinearDiffOp, section: Mapping[CoordId, Expr]) -> dict[CoordId, Expr]:
    """Evaluate op on a section: target_a = sum B(a, r, L) d_L(section_r).

    Raises:
        MissingComponentError: A source component has no expression
    """
    result = {}
    for coord, terms in section_summands(op, section).items():
        total = Expr.zero(op.spec)
        for term in terms:
            total = total + term
        result[coord] = total
    return result


def section_summands(op: LinearDiffOp, section: Mapping[CoordId, Expr]) -> dict[CoordId, list[Expr]]:
    """The terms B(a, r, L) d_L(section_r) per target component, uncollected.

    Raises:
        MissingComponentError: A source component has no expression
    """
    for coord in op.source_coords():
        if coord not in section:
            raise MissingComponentError(f"Section has no component {format_coordinate(coord)}")
    result: dict[CoordId, list[Expr]] = {coord: [] for coord in op.target_coords()}
    prolonged: dict[tuple[CoordId, SymMultiIndex], Expr] = {}
    for (a, r, jet), value in op.coeffs.items():
        if (r, jet) not in prolonged:
            prolonged[(r, jet)] = iterated_total_derivative(section[r], jet)
        result[a].append(value * prolonged[(r, jet)])
    return result


def symbolic_section(spec: BundleSpec, families: Iterable[str]) -> dict[CoordId, Expr]:
    """Each coordinate of ``families`` bound to its own jet variable."""
    return {c: Expr.variable(spec, JetVariable(c)) for c in spec.coords_of(families)}


def collect_linear(expr: Expr, families: Iterable[str]) -> dict[tuple[CoordId, SymMultiIndex], Expr]:
    """Coefficients of an expression linear in the jets of ``families``.

    Raises:
        ValueError: A term is not of degree exactly one in those jets
    """
    names = set(families)
    collected: dict[tuple[CoordId, SymMultiIndex], dict[Monomial, Fraction]] = {}
    for mono, coeff in expr.terms.items():
        hits = [(var, exp) for var, exp in mono if var.family in names]
        if len(hits) != 1 or hits[0][1] != 1:
            raise ValueError(f"Expression is not linear in families {sorted(names)}")
        var = hits[0][0]
        _, rest = mono_without(mono, var)
        bucket = collected.setdefault((var.coord, var.jet), {})
        bucket[rest] = bucket.get(rest, 0) + coeff
    return {key: Expr.from_terms(expr.spec, terms) for key, terms in collected.items()}


def operator_from_images(
    spec: BundleSpec,
    source: tuple[str, ...],
    target: tuple[str, ...],
    images: Mapping[CoordId, Expr],
    role: Optional[OperatorRole] = None,
) -> LinearDiffOp:
    coeffs: dict[CoeffKey, Expr] = {}
    for a, image in images.items():
        for (r, jet), value in collect_linear(image, source).items():
            coeffs[(a, r, jet)] = value
    return LinearDiffOp(spec, source, target, coeffs, role)


def compose(outer: LinearDiffOp, inner: LinearDiffOp) -> LinearDiffOp:
    """outer after inner, by applying both to a symbolic section and collecting.

    Raises:
        BundleMismatchError: inner's target families are not outer's source
    """
    if outer.spec != inner.spec or set(inner.target) != set(outer.source):
        raise BundleMismatchError(
            f"Cannot compose: inner target {inner.target} is not outer source {outer.source}"
        )
    section = symbolic_section(inner.spec, inner.source)
    middle = apply_to_section(inner, section)
    images = apply_to_section(outer, middle)
    return operator_from_images(outer.spec, inner.source, outer.target, images)


def _dual_groups(op: LinearDiffOp) -> tuple[tuple[str, ...], tuple[str, ...]]:
    try:
        source = tuple(op.spec.dual_name(name) for name in op.target)
        target = tuple(op.spec.dual_name(name) for name in op.source)
    except KeyError as e:
        raise BundleMismatchError(f"Adjoint needs declared dual families: {e}") from None
    return source, target


def adjoint_eta(op: LinearDiffOp) -> LinearDiffOp:
    """The intertwining adjoint eta(op).

    For each stored coefficient B at (a, r, T) and every sub-multi-index
    L of T, contributes (-1)^|T| * binom(T, L) * d_{T-L} B at
    (dual r, dual a, L), where binom is the product of per-index binomials.
    """
    source, target = _dual_groups(op)
    spec = op.spec
    coeffs: dict[CoeffKey, Expr] = {}
    for (a, r, whole), value in op.coeffs.items():
        sign = -1 if len(whole) % 2 else 1
        key_a, key_r = spec.dual(r), spec.dual(a)
        for part in whole.sub_indices():
            term = iterated_total_derivative(value, whole.minus(part))
            term = term.scale(sign * leibniz_weight(part, whole))
            key = (key_a, key_r, part)
            coeffs[key] = coeffs[key] + term if key in coeffs else term
    return LinearDiffOp(spec, source, target, coeffs, op.role.adjoint)


def pairing(op: LinearDiffOp, duals: Mapping[CoordId, Expr], images: Mapping[CoordId, Expr]) -> Expr:
    """sum over target components of (dual a) * image_a."""
    total = Expr.zero(op.spec)
    for a, image in images.items():
        total = total + duals[a] * image
    return total


def adjoint_by_parts(op: LinearDiffOp) -> LinearDiffOp:
    """eta(op) by integrating <q, op(xi)> by parts, independent of ``adjoint_eta``.

    The pairing is linear in the source jets, so its variational derivative
    in source component r is the r-th row of the adjoint acting on q.
    """
    source, target = _dual_groups(op)
    spec = op.spec
    images = apply_to_section(op, symbolic_section(spec, op.source))
    duals = {a: Expr.variable(spec, JetVariable(spec.dual(a))) for a in op.target_coords()}
    density = pairing(op, duals, images)

    jets: dict[CoordId, set[SymMultiIndex]] = {}
    for var in density.variables():
        if var.family in op.source:
            jets.setdefault(var.coord, set()).add(var.jet)
    rows = {
        spec.dual(r): variational_derivative(density, r, jets.get(r, ()))
        for r in op.source_coords()
    }
    return operator_from_images(spec, source, target, rows, op.role.adjoint)


def pairing_defect(op: LinearDiffOp, eta: Callable[[LinearDiffOp], LinearDiffOp] = adjoint_eta) -> Density:
    """<q, op(xi)> - <eta(op)(q), xi> with q and xi independent families.

    Always d_H-exact for a correct adjoint.
    """
    spec = op.spec
    adjoint = eta(op)
    xi = symbolic_section(spec, op.source)
    q = symbolic_section(spec, adjoint.source)
    duals = {a: q[spec.dual(a)] for a in op.target_coords()}
    first = pairing(op, duals, apply_to_section(op, xi))
    back = apply_to_section(adjoint, q)
    second = Expr.zero(spec)
    for r in op.source_coords():
        second = second + back[spec.dual(r)] * xi[r]
    _logger.debug(f"Pairing defect for {op!r}")
    return Density(first - second)
