"""Airfoil generation, PARSEC annotation, benchmark metrics and editing.

Airfoils are ``(N, 2)`` float arrays in Selig order; PARSEC values are dicts
keyed by ``PARSEC_NAMES``.
"""

from ._afbench import *  # noqa: F401,F403
from ._afbench import AfbenchError, Service, __version__  # noqa: F401
