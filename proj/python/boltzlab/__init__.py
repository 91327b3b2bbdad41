"""Spatially homogeneous Boltzmann equation on a velocity grid."""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, NumericalError  # noqa: F401
