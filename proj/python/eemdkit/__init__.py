"""Empirical mode decomposition, ensemble EMD and multiscale regression."""

from ._eemdkit import *  # noqa: F401,F403
from ._eemdkit import __version__  # noqa: F401
