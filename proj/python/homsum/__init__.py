"""Homogeneous sums of independent variables: coefficients, laws, Monte Carlo, distances and bounds."""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, NumericError  # noqa: F401

__version__ = "0.1.0"
