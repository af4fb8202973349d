"""Selection-mutation recursions on atomic type distributions."""

from ._selmut import *  # noqa: F401,F403
from ._selmut import __doc__  # noqa: F401

__version__ = "0.1.0"
