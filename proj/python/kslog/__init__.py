from ._kslog import *  # noqa: F401,F403
