"""Root systems for all simple types and exact sl_n modules."""
from .elements import *  # noqa: F401,F403
from .modules import *  # noqa: F401,F403
from .roots import *  # noqa: F401,F403
