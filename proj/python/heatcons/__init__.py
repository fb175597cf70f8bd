"""Conservation tests for heat semigroups on weighted model manifolds."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ConfigError,
    Error,
    ManifoldSpec,
    NumericsError,
    ParseError,
    RadialExpr,
    ValidationError,
    Verdict,
    analyze,
)

__version__ = "0.1.0"


def euclidean(dimension: int = 2) -> ManifoldSpec:
    """Flat R^n."""
    return ManifoldSpec(dimension, "r", "1", "0")
