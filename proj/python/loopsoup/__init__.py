"""Loop-soup condensation toolkit (Python bindings)."""

from ._loopsoup import *  # noqa: F401,F403
from ._loopsoup import __doc__  # noqa: F401
