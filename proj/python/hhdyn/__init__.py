"""Two distant 1D hydrogen atoms driven by shaped laser pulses."""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, NumericalError, preset_names, preset_config, parse_config, load_config

__all__ = [name for name in dir() if not name.startswith("_")]
