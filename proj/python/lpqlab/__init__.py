from ._core import *  # noqa: F401,F403
from ._core import __version__, SCHEMA_VERSION  # noqa: F401
