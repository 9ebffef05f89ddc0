"""Registry of model builders addressed by selector."""

import dataclasses
from typing import Callable, Dict

from ..calculus.operators import CoeffKey
from ..errors import ModelParameterError
from ..utils.logger import get_logger
from .base import Model, ModelBuilder
from .bf import BFBuilder
from .chern_simons import ChernSimonsBuilder

_logger = get_logger("models.factory")

# Registry of model families; the selector's head picks the entry
BUILDERS: Dict[str, Callable[..., ModelBuilder]] = {
    "cs": ChernSimonsBuilder,
    "bf": BFBuilder,
}

# Configurations run by ``verify all``
DEFAULT_SELECTORS = ("cs", "bf:3:1:1", "bf:5:2:2", "bf:6:2:3")


def create_builder(selector: str) -> ModelBuilder:
    """Create the builder for a selector (``cs`` or ``bf:<n>:<p>:<q>``).

    Raises:
        ModelParameterError: Unknown selector or invalid parameters
    """
    head, *params = selector.strip().lower().split(":")
    if head not in BUILDERS:
        available = ", ".join(BUILDERS.keys())
        raise ModelParameterError(f"Unknown model: '{selector}'. Available models: {available}")
    try:
        values = [int(p) for p in params]
    except ValueError:
        raise ModelParameterError(f"Model parameters must be integers: '{selector}'") from None
    if head == "cs" and values:
        raise ModelParameterError("Model 'cs' takes no parameters")
    if head == "bf" and len(values) != 3:
        raise ModelParameterError(f"Model 'bf' needs bf:<n>:<p>:<q>, got '{selector}'")
    return BUILDERS[head](*values)


def create_model(selector: str) -> Model:
    """Build the model a selector names."""
    builder = create_builder(selector)
    _logger.info(f"Creating model: {builder.name}")
    return builder.build()


def resolve_selectors(selector: str) -> list[str]:
    """``all`` expands to the default configurations."""
    return list(DEFAULT_SELECTORS) if selector.strip().lower() == "all" else [selector]


def mutation_keys(model: Model, count: int = 3) -> list[CoeffKey]:
    """Spread of gauge-symmetry coefficient keys: first, middle and last, and so on."""
    keys = [key for key, _ in model.gauge_symmetry.sorted_coeffs()]
    if not keys:
        return []
    if len(keys) <= count:
        return keys
    step = (len(keys) - 1) / (count - 1) if count > 1 else 0
    return list(dict.fromkeys(keys[round(i * step)] for i in range(count)))


def mutate_sign(model: Model, key: CoeffKey) -> Model:
    """Copy of the model with one gauge-symmetry coefficient negated.

    Raises:
        KeyError: No coefficient under ``key``
    """
    upsilon = model.gauge_symmetry
    if key not in upsilon.coeffs:
        raise KeyError(f"Gauge symmetry has no coefficient at {key}")
    coeffs = dict(upsilon.coeffs)
    coeffs[key] = -coeffs[key]
    mutated = upsilon.with_coeffs(coeffs)
    position = [k for k, _ in upsilon.sorted_coeffs()].index(key)
    return dataclasses.replace(model, name=f"{model.name}~{position}", gauge_symmetry=mutated, sigma=None, chain=None)


def register_builder(name: str, factory: Callable[..., ModelBuilder]) -> None:
    """Register a custom model family under ``name``."""
    BUILDERS[name.lower()] = factory
    _logger.info(f"Registered model builder: {name}")
