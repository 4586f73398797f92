"""Exact K-stability invariants of toric test configurations."""

from .errors import CrossCheckFailure, KstabError
from .geometry import PLConvexFunction, RationalPolytope
from .testconfig import MonomialFlagIdeal, bridge, config_to_flag, flag_blowup, toric_config
from .toric import Fan, PolarizedToric, ToricDivisor

__all__ = ["CrossCheckFailure", "Fan", "KstabError", "MonomialFlagIdeal", "PLConvexFunction",
           "PolarizedToric", "RationalPolytope", "ToricDivisor", "bridge", "config_to_flag",
           "flag_blowup", "toric_config"]

__version__ = "0.1.0"
