"""Gaudin Hamiltonians, shift-of-argument families and their joint spectra."""
from .classical import *  # noqa: F401,F403
from .family import *  # noqa: F401,F403
from .shift import *  # noqa: F401,F403
from .spectrum import *  # noqa: F401,F403
