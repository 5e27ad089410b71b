"""Continuous-time random walks on Z²."""

from .kernel import WalkKernel
from .walk import (
    contained_in_annulus,
    displacement_tail,
    erdos_taylor_limit,
    first_meeting_time,
    fit_tail_constant,
    meeting_probability,
    sample_displacement,
    walk_position,
)

__all__ = [
    "WalkKernel",
    "sample_displacement",
    "walk_position",
    "first_meeting_time",
    "meeting_probability",
    "contained_in_annulus",
    "erdos_taylor_limit",
    "displacement_tail",
    "fit_tail_constant",
]
