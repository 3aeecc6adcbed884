"""Entangled photon-pair source and WDM-QKD simulator (C++ core)."""

from ._wdmqkd import *  # noqa: F401,F403
from ._wdmqkd import __version__  # noqa: F401
