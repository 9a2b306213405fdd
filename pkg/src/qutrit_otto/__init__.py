"""Relativistic quantum Otto engine with a three-level Unruh-DeWitt detector."""

from .correlators import CorrelatorSpec
from .cycle import CycleSetup, run_cycle
from .detector import GapConfig, GapSchedule, QutritState, SwitchingProfile
from .kernels import BACKEND, HAVE_COMPILED
from .response import ResponseSet, response, stage_response_set

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAVE_COMPILED",
    "CorrelatorSpec",
    "CycleSetup",
    "GapConfig",
    "GapSchedule",
    "QutritState",
    "ResponseSet",
    "SwitchingProfile",
    "response",
    "run_cycle",
    "stage_response_set",
]
