"""Two-mode transmon charge-sensitivity laboratory (Python bindings)."""

from _twomode import *  # noqa: F401,F403
from _twomode import __version__  # noqa: F401
