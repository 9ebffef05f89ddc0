"""Model values and the abstract model builder."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional

from ..algebra.bundle import BundleSpec, CoordId, FamilyRole
from ..algebra.expr import Density
from ..calculus.operators import LinearDiffOp
from ..calculus.variational import CurrentVector
from ..errors import BundleMismatchError
from ..theory.chains import ReducibilityChain
from ..theory.noether import OnShellWitness


@dataclass(frozen=True)
class Model:
    """A gauge theory ready for verification.

    Attributes:
        name: Selector the model was built from (``cs``, ``bf:5:2:2``)
        spec: BundleSpec with fields, parameters and all duals
        lagrangian: Lagrangian density
        gauge_symmetry: Gauge symmetry operator, parameters -> dynamic fields
        sigma: Current with L_theta L = d_l sigma^l, when known
        chain: Reducibility chain, when the symmetry is reducible
        expected_checks: Names of the checks the model's suite runs
        noether_witnesses: Witnesses for Noether rows that vanish only on-shell
        notes: Free-form remarks carried into reports
    """

    name: str
    spec: BundleSpec
    lagrangian: Density
    gauge_symmetry: LinearDiffOp
    sigma: Optional[CurrentVector] = None
    chain: Optional[ReducibilityChain] = None
    expected_checks: tuple[str, ...] = ()
    noether_witnesses: dict[CoordId, OnShellWitness] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        fields = {f.name for f in self.spec.families_with_role(FamilyRole.FIELD)}
        if set(self.gauge_symmetry.target) != fields:
            raise BundleMismatchError(
                f"Gauge symmetry of '{self.name}' targets {self.gauge_symmetry.target}, "
                f"dynamic fields are {sorted(fields)}"
            )

    @property
    def fields(self) -> list[str]:
        return [f.name for f in self.spec.families_with_role(FamilyRole.FIELD)]


class ModelBuilder(ABC):
    """Builds one family of models.

    Builders are pure: repeated ``build`` calls give equal models.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Selector of the built model."""
        ...

    @abstractmethod
    def build(self) -> Model:
        """Construct the model.

        Raises:
            ModelParameterError: If the builder's parameters are invalid
        """
        ...
