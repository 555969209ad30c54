"""Resonances of Capelli operators: dilation transforms, resolvent continuation and residue forms."""

from .errors import (CapresError, ConfigError, ContourCollision, CrossCheckFailure, DomainError, GridTooCoarse,
                     InvalidSupport, NonConvergence, PoleProximity, SingularElement)
from .numerics import DEFAULT_CFG, EvenPWFunction, QuadratureConfig, TestFunction2D, make_even_pw

__version__ = "0.1.0"

__all__ = [
    "CapresError", "ConfigError", "ContourCollision", "CrossCheckFailure", "DomainError", "GridTooCoarse",
    "InvalidSupport", "NonConvergence", "PoleProximity", "SingularElement",
    "DEFAULT_CFG", "EvenPWFunction", "QuadratureConfig", "TestFunction2D", "make_even_pw",
]
