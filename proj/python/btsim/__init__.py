"""btsim: branch-transfer circuit simulator and analysis toolkit."""

from btsim._core import *  # noqa: F401,F403
from btsim._core import __version__  # noqa: F401
