"""Numerical laboratory for max-additive and max-plus linear operator semigroups."""

from .core import BOTTOM, ZERO, MaxScalar, oplus, otimes
from .function_space import Grid, GridFunction, Norm, TensorGrid, dist, pw_oplus, pw_otimes
from .semigroup import ErrorBudget, Property, PropertyReport, SemigroupOperator, Verdict

__version__ = "0.1.0"

__all__ = [
    "BOTTOM",
    "ZERO",
    "MaxScalar",
    "oplus",
    "otimes",
    "Grid",
    "GridFunction",
    "Norm",
    "TensorGrid",
    "dist",
    "pw_oplus",
    "pw_otimes",
    "ErrorBudget",
    "Property",
    "PropertyReport",
    "SemigroupOperator",
    "Verdict",
    "__version__",
]
