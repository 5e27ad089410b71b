"""Look-down construction used as an oracle for the spatial simulators."""

from .graph import (
    ArrowGraph,
    Trajectory,
    ancestor,
    build_graph,
    coalescent_from_lookdown,
    descendants,
    rebirth_from_lookdown,
    size_signature,
)

__all__ = [
    "ArrowGraph",
    "Trajectory",
    "build_graph",
    "ancestor",
    "descendants",
    "coalescent_from_lookdown",
    "rebirth_from_lookdown",
    "size_signature",
]
