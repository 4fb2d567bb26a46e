"""Connections on the projective line: transport, monodromy, formal normal forms, Stokes rays."""
from .connection import *  # noqa: F401,F403
from .normal_form import *  # noqa: F401,F403
from .rigidity import *  # noqa: F401,F403
from .stokes import *  # noqa: F401,F403
from .transport import *  # noqa: F401,F403
