"""Zeros and value distribution of linear combinations of L-functions."""

__version__ = "0.1.0"

from .errors import (CheckFailed, ComputationError, ConfigError, LFZError)  # noqa: F401
from .lfunc import (LinearCombination, dirichlet_spec, eval_F, eval_L, single,  # noqa: F401
                    zeta_spec)
