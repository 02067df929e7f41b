"""Walks, entropy, and harmonic fields on random environments."""

from ._core import (
    BudgetError,
    Environment,
    ModelSpec,
    ParseError,
    ValidationError,
    corrector_profile,
    delta,
    delta_n,
    displacement_profile,
    entropy,
    entropy_profile,
    heat_kernel,
    loads,
    make_env,
    poincare_constant,
    propagate,
    sample_path,
)

__all__ = [
    "BudgetError",
    "Environment",
    "ModelSpec",
    "ParseError",
    "ValidationError",
    "corrector_profile",
    "delta",
    "delta_n",
    "displacement_profile",
    "entropy",
    "entropy_profile",
    "heat_kernel",
    "loads",
    "make_env",
    "poincare_constant",
    "propagate",
    "sample_path",
]
