"""Noether's second theorem, reducibility chains and verification reports."""

from .chains import ReducibilityChain, check_dual_chain, check_reducibility_chain, dual_noether_chain
from .noether import (
    CofactorTable,
    OnShellWitness,
    check_factorization,
    check_gauge_symmetry,
    check_noether_identity,
    check_on_shell_zero,
    gauge_to_noether,
    make_trivial_gauge_symmetry,
    noether_to_gauge,
)
from .oracle import NumericOracle
from .report import CheckResult, CheckStatus, VerificationReport

__all__ = [
    "ReducibilityChain",
    "check_dual_chain",
    "check_reducibility_chain",
    "dual_noether_chain",
    "CofactorTable",
    "OnShellWitness",
    "check_factorization",
    "check_gauge_symmetry",
    "check_noether_identity",
    "check_on_shell_zero",
    "gauge_to_noether",
    "make_trivial_gauge_symmetry",
    "noether_to_gauge",
    "NumericOracle",
    "CheckResult",
    "CheckStatus",
    "VerificationReport",
]
