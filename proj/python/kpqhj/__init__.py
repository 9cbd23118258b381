"""Kronig-Penney band structure through the reduced action of the quantum Hamilton-Jacobi equation."""

from ._kpqhj import *  # noqa: F401,F403
from ._kpqhj import __doc__  # noqa: F401
