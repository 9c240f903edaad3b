from _nemel import *  # noqa: F401,F403
from _nemel import __version__  # noqa: F401
