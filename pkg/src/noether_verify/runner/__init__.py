"""Check suites, the concurrent verifier, property runs and documents."""

from .documents import dump_model, euler_lagrange_map, load_density, load_operator
from .properties import SUITES, PropertyProfile, PropertyRun, run_property
from .suites import NamedCheck, SuiteSettings, build_suite
from .verifier import Verifier, verify_selector

__all__ = [
    "NamedCheck",
    "PropertyProfile",
    "PropertyRun",
    "SUITES",
    "SuiteSettings",
    "Verifier",
    "build_suite",
    "dump_model",
    "euler_lagrange_map",
    "load_density",
    "load_operator",
    "run_property",
    "verify_selector",
]
