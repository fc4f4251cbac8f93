"""Radial cubic NLS Galerkin simulator and Gibbs-measure harness."""

from ._ballnls import *  # noqa: F401,F403
from ._ballnls import __version__  # noqa: F401
