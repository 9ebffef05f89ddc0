"""Noether's second theorem in both directions, identities and on-shell checks."""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from ..algebra.bundle import BundleSpec, CoordId, FamilyRole
from ..algebra.expr import Density, Expr
from ..algebra.indices import SymMultiIndex
from ..algebra.parser import format_coordinate
from ..calculus.operators import (
    CoeffKey,
    LinearDiffOp,
    OperatorRole,
    adjoint_eta,
    apply_to_section,
    compose,
    symbolic_section,
)
from ..calculus.variational import (
    EulerLagrange,
    GeneralizedVectorField,
    iterated_total_derivative,
    lie_derive_density,
    occurring_jets,
    total_derivative,
    variational_residual,
    variational_summands,
)
from ..errors import AntisymmetryError, BundleMismatchError, MissingComponentError, RoleError
from ..utils.logger import get_logger
from .oracle import NumericOracle
from .report import DEFAULT_RESIDUAL_TERMS, ORACLE_DISAGREES, CheckResult, residual_text

_logger = get_logger("theory.noether")

WitnessKey = tuple[CoordId, SymMultiIndex]


def _require_role(op: LinearDiffOp, role: OperatorRole) -> None:
    if op.role is not role:
        raise RoleError(f"Expected a {role.value} operator, got {op.role.value}")


def gauge_to_noether(upsilon: LinearDiffOp) -> LinearDiffOp:
    """Noether operator eta(upsilon) of a gauge symmetry."""
    _require_role(upsilon, OperatorRole.GAUGE_SYMMETRY)
    return adjoint_eta(upsilon)


def noether_to_gauge(delta: LinearDiffOp) -> LinearDiffOp:
    """Gauge symmetry eta(delta) of a Noether operator."""
    _require_role(delta, OperatorRole.NOETHER)
    return adjoint_eta(delta)


@dataclass(frozen=True)
class OnShellWitness:
    """Cofactors M^{i,L} certifying A = sum M^{i,L} d_L E_i."""

    cofactors: Mapping[WitnessKey, Expr] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not any(not v.is_zero() for v in self.cofactors.values())

    def summands(self, el: EulerLagrange) -> list[Expr]:
        """The terms M^{i,L} d_L E_i, uncollected.

        Raises:
            MissingComponentError: A cofactor names a component with no E_i
        """
        terms = []
        for (coord, jet), cofactor in self.cofactors.items():
            if coord not in el:
                raise MissingComponentError(
                    f"Witness names {format_coordinate(coord)}, which has no Euler-Lagrange expression"
                )
            terms.append(cofactor * iterated_total_derivative(el[coord], jet))
        return terms

    def combine(self, el: EulerLagrange, spec: BundleSpec) -> Expr:
        """sum M^{i,L} d_L E_i."""
        total = Expr.zero(spec)
        for term in self.summands(el):
            total = total + term
        return total

    def shifted(self, index: int) -> "OnShellWitness":
        """Witness of d_index A, by the Leibniz rule on every cofactor term."""
        shifted: dict[WitnessKey, Expr] = {}

        def add(key: WitnessKey, value: Expr) -> None:
            shifted[key] = shifted[key] + value if key in shifted else value

        for (coord, jet), cofactor in self.cofactors.items():
            add((coord, jet), total_derivative(cofactor, index))
            add((coord, jet.add_index(index)), cofactor)
        return OnShellWitness({k: v for k, v in shifted.items() if not v.is_zero()})


def check_on_shell_zero(
    expr: Expr,
    el: EulerLagrange,
    witness: Optional[OnShellWitness] = None,
) -> bool:
    """Whether expr minus the witness combination is exactly zero.

    With no witness this is an exact-zero test.
    """
    if witness is None or witness.is_empty():
        return expr.is_zero()
    return (expr - witness.combine(el, expr.spec)).is_zero()


def noether_rows(delta: LinearDiffOp, el: EulerLagrange) -> dict[CoordId, Expr]:
    """sum over (i, L) of Delta^{i,L}_r d_L E_i, one row per dual parameter component."""
    spec = delta.spec
    section = {
        coord: el.get(spec.dual(coord), Expr.zero(spec)) for coord in delta.source_coords()
    }
    return apply_to_section(delta, section)


def _row_summands(delta: LinearDiffOp, el: EulerLagrange) -> dict[CoordId, list[Expr]]:
    spec = delta.spec
    summands: dict[CoordId, list[Expr]] = {coord: [] for coord in delta.target_coords()}
    for (a, r, jet), value in delta.coeffs.items():
        source = el.get(spec.dual(r))
        if source is not None:
            summands[a].append(value * iterated_total_derivative(source, jet))
    return summands


def check_noether_identity(
    delta: LinearDiffOp,
    el: EulerLagrange,
    name: str = "noether-identity",
    witnesses: Optional[Mapping[CoordId, OnShellWitness]] = None,
    oracle: Optional[NumericOracle] = None,
    residual_terms: Optional[int] = DEFAULT_RESIDUAL_TERMS,
    failure_level: int = logging.WARNING,
) -> CheckResult:
    """Row-by-row check that Delta applied to the Euler-Lagrange expressions vanishes.

    A row passes when it is exactly zero or, if a witness is supplied for
    it, when it is on-shell zero with that witness.

    Args:
        delta: Noether operator
        el: Euler-Lagrange expressions of the fields delta pairs with
        name: Check name in the report
        witnesses: Optional per-row witnesses, keyed by dual parameter component
        oracle: Numeric oracle re-checking exactly-zero rows summand by summand
        residual_terms: Truncation of printed residuals
        failure_level: Log level of the failure message
    """
    rows = noether_rows(delta, el)
    witnesses = witnesses or {}
    failing: dict[CoordId, Expr] = {}
    on_shell: list[str] = []
    for coord, row in rows.items():
        if row.is_zero():
            continue
        if coord in witnesses and check_on_shell_zero(row, el, witnesses[coord]):
            on_shell.append(format_coordinate(coord))
            continue
        failing[coord] = row

    detail: dict = {"rows": len(rows)}
    if on_shell:
        detail["on_shell_rows"] = on_shell
    if failing:
        _logger.log(failure_level, f"{name}: {len(failing)} nonzero rows")
        return CheckResult.failed(name, residual_text(failing, residual_terms), **detail)

    if oracle is not None:
        summands = _row_summands(delta, el)
        exact = [c for c, row in rows.items() if row.is_zero()]
        agrees = all(oracle.sum_vanishes(summands[c]) for c in exact)
        detail["oracle_points"] = oracle.points
        if not agrees:
            return CheckResult.failed(name, ORACLE_DISAGREES, **detail)
    return CheckResult.passed(name, **detail)


def gauge_vector_field(upsilon: LinearDiffOp) -> GeneralizedVectorField:
    """Generalized vector field with components upsilon(xi) over the parameter jets."""
    images = apply_to_section(upsilon, symbolic_section(upsilon.spec, upsilon.source))
    return GeneralizedVectorField.from_components(upsilon.spec, images, upsilon.target)


def check_gauge_symmetry(
    upsilon: LinearDiffOp,
    lagrangian: Density,
    name: str = "gauge-symmetry",
    oracle: Optional[NumericOracle] = None,
    residual_terms: Optional[int] = DEFAULT_RESIDUAL_TERMS,
    failure_level: int = logging.WARNING,
) -> CheckResult:
    """Whether the Lie derivative of L along upsilon is d_H-exact.

    The variational derivatives are taken over fields and parameters alike.

    Raises:
        BundleMismatchError: upsilon's targets are not L's dynamic fields
    """
    spec = upsilon.spec
    fields = {
        name_ for name_ in lagrangian.coeff.families() if spec.family(name_).role is FamilyRole.FIELD
    }
    if not fields <= set(upsilon.target):
        raise BundleMismatchError(
            f"Gauge symmetry targets {upsilon.target}, Lagrangian depends on {sorted(fields)}"
        )
    lie = lie_derive_density(lagrangian, gauge_vector_field(upsilon))
    residual = variational_residual(lie)
    detail: dict = {"lie_terms": len(lie.coeff)}
    if residual:
        _logger.log(failure_level, f"{name}: Lie derivative is not d_H-exact")
        return CheckResult.failed(name, residual_text(residual, residual_terms), **detail)

    if oracle is not None:
        jets = occurring_jets(lie, spec.non_base_families())
        agrees = all(
            oracle.sum_vanishes(variational_summands(lie.coeff, coord, jets[coord])) for coord in jets
        )
        detail["oracle_points"] = oracle.points
        if not agrees:
            return CheckResult.failed(name, ORACLE_DISAGREES, **detail)
    return CheckResult.passed(name, **detail)


@dataclass(frozen=True)
class CofactorTable:
    """Antisymmetric cofactors T^{i,j,L,S}_r of a trivial gauge symmetry.

    Entries are keyed by ``(r, i, j, L, S)`` with r a parameter component
    and i, j dynamic-field components; T^{i,j,L,S}_r = -T^{j,i,S,L}_r.
    """

    spec: BundleSpec
    parameters: tuple[str, ...]
    fields: tuple[str, ...]
    entries: Mapping[tuple[CoordId, CoordId, CoordId, SymMultiIndex, SymMultiIndex], Expr]

    def __post_init__(self) -> None:
        for (r, i, j, lam, sig), value in self.entries.items():
            mirror = self.entries.get((r, j, i, sig, lam))
            total = value + mirror if mirror is not None else value
            if not total.is_zero():
                raise AntisymmetryError(
                    f"T at ({format_coordinate(r)}, {format_coordinate(i)}, {format_coordinate(j)}, "
                    f"{lam}, {sig}) is not minus its mirror entry"
                )

    @classmethod
    def antisymmetric_pair(
        cls,
        spec: BundleSpec,
        parameter: CoordId,
        first: tuple[CoordId, Iterable[int]],
        second: tuple[CoordId, Iterable[int]],
        value: Expr,
    ) -> "CofactorTable":
        """Table with a single entry and its mirror."""
        (i, lam), (j, sig) = first, second
        lam, sig = SymMultiIndex(lam), SymMultiIndex(sig)
        entries = {(parameter, i, j, lam, sig): value, (parameter, j, i, sig, lam): -value}
        return cls(spec, (parameter.family,), tuple(dict.fromkeys([i.family, j.family])), entries)


def make_trivial_gauge_symmetry(table: CofactorTable, el: EulerLagrange) -> LinearDiffOp:
    """eta(M) with M^{i,L}_r = sum over (j, S) of T^{i,j,L,S}_r d_S E_j."""
    spec = table.spec
    source = tuple(spec.dual_name(f) for f in table.fields)
    target = tuple(spec.dual_name(p) for p in table.parameters)
    coeffs: dict[CoeffKey, Expr] = {}
    for (r, i, j, lam, sig), value in table.entries.items():
        if j not in el:
            raise MissingComponentError(f"No Euler-Lagrange expression for {format_coordinate(j)}")
        key = (spec.dual(r), spec.dual(i), lam)
        term = value * iterated_total_derivative(el[j], sig)
        coeffs[key] = coeffs[key] + term if key in coeffs else term
    noether = LinearDiffOp(spec, source, target, coeffs, OperatorRole.NOETHER)
    return adjoint_eta(noether)


def check_factorization(
    upsilon: LinearDiffOp,
    candidate: LinearDiffOp,
    h: LinearDiffOp,
    witnesses: Mapping[CoeffKey, OnShellWitness],
    el: EulerLagrange,
    name: str = "factorization",
    residual_terms: Optional[int] = DEFAULT_RESIDUAL_TERMS,
) -> CheckResult:
    """Certificate check for candidate = upsilon after h + T, T on-shell zero.

    Every nonzero coefficient of T needs a witness under its own key.
    """
    remainder = candidate - compose(upsilon, h)
    failing: dict[CoordId, Expr] = {}
    witnessed = 0
    for key, value in remainder.sorted_coeffs():
        if key in witnesses and check_on_shell_zero(value, el, witnesses[key]):
            witnessed += 1
            continue
        failing[key[0]] = failing.get(key[0], Expr.zero(value.spec)) + value
    if failing:
        return CheckResult.failed(name, residual_text(failing, residual_terms), witnessed=witnessed)
    return CheckResult.passed(name, witnessed=witnessed)

