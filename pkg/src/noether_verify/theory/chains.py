"""Reducibility chains of gauge symmetries and their dual Noether chains."""

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

from ..calculus.operators import (
    CoeffKey,
    LinearDiffOp,
    OperatorRole,
    adjoint_eta,
    apply_to_section,
    compose,
    section_summands,
    symbolic_section,
)
from ..calculus.variational import EulerLagrange
from ..errors import BundleMismatchError, RoleError
from ..utils.logger import get_logger
from .noether import OnShellWitness, check_on_shell_zero
from .oracle import NumericOracle
from .report import DEFAULT_RESIDUAL_TERMS, ORACLE_DISAGREES, CheckResult, residual_text

_logger = get_logger("theory.chains")

StageWitnesses = Mapping[CoeffKey, OnShellWitness]


@dataclass(frozen=True)
class ReducibilityChain:
    """Stage operators upsilon^0, ..., upsilon^N with upsilon^k: E_k -> E_(k-1).

    ``witnesses[k]`` optionally certifies the composition ending in stage k
    on-shell, coefficient by coefficient.
    """

    stages: tuple[LinearDiffOp, ...] = ()
    witnesses: tuple[Optional[StageWitnesses], ...] = field(default=())

    def __post_init__(self) -> None:
        for k, stage in enumerate(self.stages):
            if stage.role is not OperatorRole.CHAIN_STAGE:
                raise RoleError(f"Chain stage {k} has role {stage.role.value}")
            if k and set(stage.target) != set(self.stages[k - 1].source):
                raise BundleMismatchError(
                    f"Chain stage {k} targets {stage.target}, stage {k - 1} acts on {self.stages[k - 1].source}"
                )
        if self.witnesses and len(self.witnesses) != len(self.stages):
            raise ValueError("One witness table per stage, or none at all")

    def __len__(self) -> int:
        return len(self.stages)

    def __iter__(self) -> Iterator[LinearDiffOp]:
        return iter(self.stages)

    def witness(self, k: int) -> StageWitnesses:
        if not self.witnesses or self.witnesses[k] is None:
            return {}
        return self.witnesses[k]


def _check_composition(
    name: str,
    outer: LinearDiffOp,
    inner: LinearDiffOp,
    el: Optional[EulerLagrange],
    witnesses: StageWitnesses,
    oracle: Optional[NumericOracle],
    residual_terms: Optional[int],
) -> CheckResult:
    composite = compose(outer, inner)
    failing = {}
    witnessed = 0
    for key, value in composite.sorted_coeffs():
        if el is not None and key in witnesses and check_on_shell_zero(value, el, witnesses[key]):
            witnessed += 1
            continue
        failing[key[0]] = failing[key[0]] + value if key[0] in failing else value
    if failing:
        _logger.warning(f"{name}: composition does not vanish")
        return CheckResult.failed(name, residual_text(failing, residual_terms))
    detail: dict = {"exact": not witnessed, "witnessed": witnessed}
    if oracle is not None and not witnessed:
        # outer applied term by term to inner(xi), xi a symbolic section
        middle = apply_to_section(inner, symbolic_section(inner.spec, inner.source))
        summands = section_summands(outer, middle)
        detail["oracle_points"] = oracle.points
        if not all(oracle.sum_vanishes(terms) for terms in summands.values()):
            return CheckResult.failed(name, ORACLE_DISAGREES, **detail)
    return CheckResult.passed(name, **detail)


def check_stage_nonvanishing(name: str, stage: LinearDiffOp, oracle: Optional[NumericOracle]) -> CheckResult:
    """Nonvanishing of a stage: a nonzero coefficient table, numerically confirmed."""
    if stage.is_zero():
        return CheckResult.failed(name, "stage operator is identically zero", nonvanishing="syntactic")
    detail = {"nonvanishing": "syntactic", "coefficients": len(stage.coeffs)}
    if oracle is not None:
        values = [value for _, value in stage.sorted_coeffs()]
        if not oracle.nonzero_somewhere(values):
            return CheckResult.failed(name, "no coefficient evaluates nonzero", **detail)
        detail["oracle_points"] = oracle.points
    return CheckResult.passed(name, **detail)


def check_reducibility_chain(
    upsilon: LinearDiffOp,
    chain: ReducibilityChain,
    el: Optional[EulerLagrange] = None,
    oracle: Optional[NumericOracle] = None,
    name: str = "chain",
    residual_terms: Optional[int] = DEFAULT_RESIDUAL_TERMS,
) -> list[CheckResult]:
    """Compositions upsilon^(k-1) after upsilon^k, with upsilon^(-1) = upsilon.

    Every composition must vanish exactly or match its stage witnesses;
    each stage also gets a nonvanishing entry.

    Raises:
        BundleMismatchError: Stage 0 does not land in upsilon's parameters
    """
    if not chain.stages:
        return [CheckResult.skipped(f"{name}: stages", "chain is empty")]
    if set(chain.stages[0].target) != set(upsilon.source):
        raise BundleMismatchError(
            f"Chain stage 0 targets {chain.stages[0].target}, gauge symmetry acts on {upsilon.source}"
        )
    results: list[CheckResult] = []
    previous = upsilon
    for k, stage in enumerate(chain.stages):
        results.append(
            _check_composition(
                f"{name}: compose {k - 1},{k}", previous, stage, el, chain.witness(k), oracle, residual_terms
            )
        )
        results.append(check_stage_nonvanishing(f"{name}: stage {k} nonvanishing", stage, oracle))
        previous = stage
    return results


def dual_noether_chain(chain: ReducibilityChain) -> list[LinearDiffOp]:
    """Delta_k = eta(upsilon^k) for each stage."""
    return [adjoint_eta(stage) for stage in chain.stages]


def check_dual_chain(
    delta: LinearDiffOp,
    duals: Sequence[LinearDiffOp],
    oracle: Optional[NumericOracle] = None,
    name: str = "dual-chain",
    residual_terms: Optional[int] = DEFAULT_RESIDUAL_TERMS,
) -> list[CheckResult]:
    """Compositions Delta_k after Delta_(k-1), with Delta_(-1) the Noether operator.

    Computed directly, not inferred from the primal chain.
    """
    if not duals:
        return [CheckResult.skipped(f"{name}: stages", "chain is empty")]
    results: list[CheckResult] = []
    previous = delta
    for k, dual in enumerate(duals):
        results.append(
            _check_composition(f"{name}: compose {k},{k - 1}", dual, previous, None, {}, oracle, residual_terms)
        )
        previous = dual
    return results
