"""Support utilities and helpers."""

from .collection import RecordCollection
from .helpers import atomic_write, collect, format_float, json_safe

__all__ = [
    "RecordCollection",
    "atomic_write",
    "collect",
    "format_float",
    "json_safe",
]
