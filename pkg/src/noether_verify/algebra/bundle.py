"""Coordinate families of a composite bundle and their duals."""

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations, product
from pathlib import Path
from typing import Any, Iterable, NamedTuple, Optional

from ..errors import BundleMismatchError, IndexRangeError, UnknownFamilyError
from .indices import canonicalize_antisym

BASE_FAMILY = "x"


class FamilyRole(Enum):
    """What a coordinate family stands for."""

    BASE = "base"
    FIELD = "dynamic-field"
    PARAMETER = "parameter"
    DUAL_FIELD = "dual-field"
    DUAL_PARAMETER = "dual-parameter"

    @property
    def is_dual(self) -> bool:
        return self in (FamilyRole.DUAL_FIELD, FamilyRole.DUAL_PARAMETER)

    @property
    def dual(self) -> "FamilyRole":
        """Role of the paired family."""
        return _DUAL_ROLES[self]


_DUAL_ROLES = {
    FamilyRole.FIELD: FamilyRole.DUAL_FIELD,
    FamilyRole.DUAL_FIELD: FamilyRole.FIELD,
    FamilyRole.PARAMETER: FamilyRole.DUAL_PARAMETER,
    FamilyRole.DUAL_PARAMETER: FamilyRole.PARAMETER,
}


class CoordId(NamedTuple):
    """One independent coordinate: a family name and a canonical component."""

    family: str
    component: tuple[int, ...]


@dataclass(frozen=True)
class FieldFamily:
    """Declaration of a coordinate family.

    ``shape`` lists the range of each index; an empty shape is a scalar
    family. ``dual_of`` names the non-dual partner of a dual family.
    """

    name: str
    role: FamilyRole
    shape: tuple[int, ...] = ()
    antisym: bool = False
    dual_of: Optional[str] = None

    def components(self) -> list[tuple[int, ...]]:
        """Independent components in canonical order."""
        if not self.shape:
            return [()]
        if self.antisym:
            return list(combinations(range(self.shape[0]), len(self.shape)))
        return list(product(*(range(k) for k in self.shape)))

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "name": self.name,
            "role": self.role.value,
            "shape": list(self.shape),
            "antisym": self.antisym,
        }
        if self.dual_of:
            data["dual_of"] = self.dual_of
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FieldFamily":
        return cls(
            name=data["name"],
            role=FamilyRole(data.get("role", FamilyRole.FIELD.value)),
            shape=tuple(data.get("shape", ())),
            antisym=bool(data.get("antisym", False)),
            dual_of=data.get("dual_of"),
        )


def _infer_dual_partners(families: tuple[FieldFamily, ...], suffix: str = "_bar") -> tuple[FieldFamily, ...]:
    """Fill in ``dual_of`` for dual families that leave it out.

    The partner is the family named without ``suffix`` if there is one,
    otherwise the only unclaimed family of the partner role, shape and
    antisymmetry. Anything else stays unresolved and fails validation.
    """
    claimed = {f.dual_of for f in families if f.dual_of}
    by_name = {f.name: f for f in families}
    resolved = []
    for fam in families:
        if fam.role.is_dual and not fam.dual_of:
            partner = None
            if fam.name.endswith(suffix) and fam.name[: -len(suffix)] in by_name:
                partner = fam.name[: -len(suffix)]
            else:
                candidates = [
                    f.name
                    for f in families
                    if f.role is fam.role.dual
                    and f.shape == fam.shape
                    and f.antisym == fam.antisym
                    and f.name not in claimed
                ]
                if len(candidates) == 1:
                    partner = candidates[0]
            if partner is not None:
                claimed.add(partner)
                fam = replace(fam, dual_of=partner)
        resolved.append(fam)
    return tuple(resolved)


@dataclass(frozen=True)
class BundleSpec:
    """Base dimension plus the declared coordinate families.

    The base family ``x`` (role base, shape ``[n]``) is always present and
    always first; it is added automatically when not declared.
    """

    base_dim: int
    families: tuple[FieldFamily, ...]
    _by_name: dict[str, FieldFamily] = field(default_factory=dict, init=False, repr=False, compare=False)
    _ranks: dict[str, int] = field(default_factory=dict, init=False, repr=False, compare=False)
    _duals: dict[str, str] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.base_dim < 1:
            raise ValueError(f"base_dim must be positive, got {self.base_dim}")
        families = tuple(self.families)
        for fam in families:
            if fam.name == BASE_FAMILY and fam.role is not FamilyRole.BASE:
                raise BundleMismatchError(
                    f"Family name '{BASE_FAMILY}' is reserved for the base coordinates, got a {fam.role.value} family"
                )
        if not any(f.role is FamilyRole.BASE for f in families):
            families = (FieldFamily(BASE_FAMILY, FamilyRole.BASE, (self.base_dim,)),) + families
        families = _infer_dual_partners(families)
        object.__setattr__(self, "families", families)

        for rank, fam in enumerate(families):
            if fam.name in self._by_name:
                raise ValueError(f"Duplicate family name: '{fam.name}'")
            if fam.antisym and len(set(fam.shape)) > 1:
                raise ValueError(f"Antisymmetric family '{fam.name}' needs equal index ranges")
            self._by_name[fam.name] = fam
            self._ranks[fam.name] = rank

        for fam in families:
            if not fam.role.is_dual:
                continue
            partner = self._by_name.get(fam.dual_of or "")
            if partner is None:
                raise ValueError(f"Dual family '{fam.name}' has no partner; set dual_of")
            if partner.role is not fam.role.dual or partner.shape != fam.shape or partner.antisym != fam.antisym:
                raise ValueError(f"Dual family '{fam.name}' does not match '{partner.name}'")
            if partner.name in self._duals:
                raise ValueError(f"Family '{partner.name}' has more than one dual")
            self._duals[partner.name] = fam.name
            self._duals[fam.name] = partner.name

    def __hash__(self) -> int:
        return hash((self.base_dim, self.families))

    def family(self, name: str) -> FieldFamily:
        """Look up a family by name.

        Raises:
            UnknownFamilyError: If no such family is declared
        """
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownFamilyError(f"Unknown family: '{name}'") from None

    def has_family(self, name: str) -> bool:
        return name in self._by_name

    def rank(self, name: str) -> int:
        """Declaration position, used by the monomial order."""
        return self._ranks[name]

    @property
    def base(self) -> FieldFamily:
        return next(f for f in self.families if f.role is FamilyRole.BASE)

    def families_with_role(self, *roles: FamilyRole) -> list[FieldFamily]:
        return [f for f in self.families if f.role in roles]

    def non_base_families(self) -> list[str]:
        return [f.name for f in self.families if f.role is not FamilyRole.BASE]

    def coords(self, name: str) -> list[CoordId]:
        """Independent coordinates of a family."""
        return [CoordId(name, c) for c in self.family(name).components()]

    def coords_of(self, names: Iterable[str]) -> list[CoordId]:
        return [c for name in names for c in self.coords(name)]

    def base_coord(self, index: int) -> CoordId:
        return CoordId(self.base.name, (index,))

    def dual_name(self, name: str) -> str:
        """Name of the family paired with ``name``.

        Raises:
            UnknownFamilyError: If ``name`` has no declared dual
        """
        self.family(name)
        try:
            return self._duals[name]
        except KeyError:
            raise UnknownFamilyError(f"Family '{name}' has no declared dual") from None

    def has_dual(self, name: str) -> bool:
        return name in self._duals

    def dual(self, coord: CoordId) -> CoordId:
        """The paired coordinate (same component, dual family)."""
        return CoordId(self.dual_name(coord.family), coord.component)

    def resolve(self, name: str, indices: Iterable[int]) -> Optional[tuple[CoordId, int]]:
        """Map a possibly non-canonical index tuple to its independent coordinate.

        Returns:
            ``(coord, sign)``, or None for a repeated antisymmetric index

        Raises:
            UnknownFamilyError: Unknown family
            IndexRangeError: Wrong arity or index out of range
        """
        fam = self.family(name)
        items = tuple(indices)
        if len(items) != len(fam.shape):
            raise IndexRangeError(
                f"Family '{name}' takes {len(fam.shape)} indices, got {len(items)}"
            )
        for value, bound in zip(items, fam.shape):
            if not 0 <= value < bound:
                raise IndexRangeError(f"Index {value} out of range 0..{bound - 1} for family '{name}'")
        if not fam.antisym:
            return CoordId(name, items), 1
        canonical = canonicalize_antisym(items)
        if canonical is None:
            return None
        component, sign = canonical
        return CoordId(name, component), sign

    def extend(self, families: Iterable[FieldFamily]) -> "BundleSpec":
        """New BundleSpec with extra families appended."""
        return BundleSpec(self.base_dim, self.families + tuple(families))

    def to_dict(self) -> dict[str, Any]:
        return {
            "base_dim": self.base_dim,
            "families": [f.to_dict() for f in self.families],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BundleSpec":
        return cls(
            base_dim=int(data["base_dim"]),
            families=tuple(FieldFamily.from_dict(f) for f in data.get("families", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "BundleSpec":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "BundleSpec":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def with_duals(spec_families: Iterable[FieldFamily], suffix: str = "_bar") -> list[FieldFamily]:
    """Families followed by a dual for every field and parameter family."""
    families = list(spec_families)
    duals = [
        FieldFamily(f.name + suffix, f.role.dual, f.shape, f.antisym, dual_of=f.name)
        for f in families
        if f.role in (FamilyRole.FIELD, FamilyRole.PARAMETER)
    ]
    return families + duals
