"""Chern-Simons and BF gauge models."""

from .base import Model, ModelBuilder
from .bf import build_bf, build_bf_chain
from .chern_simons import build_chern_simons, cs_reparameterization, cs_splitting_variant
from .factory import create_model, mutate_sign

__all__ = [
    "Model",
    "ModelBuilder",
    "build_bf",
    "build_bf_chain",
    "build_chern_simons",
    "cs_reparameterization",
    "cs_splitting_variant",
    "create_model",
    "mutate_sign",
]
