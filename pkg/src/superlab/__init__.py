"""Local super-observables: weak values, superenergy and superoscillation in time."""

__version__ = "0.1.0"

from .numerics import *  # noqa: E402,F401,F403
from .weak_value import *  # noqa: E402,F401,F403
from .rotor import *  # noqa: E402,F401,F403
from .oscillator import *  # noqa: E402,F401,F403
from .energy_analysis import *  # noqa: E402,F401,F403
from .time_evolution import *  # noqa: E402,F401,F403
