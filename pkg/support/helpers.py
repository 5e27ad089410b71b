"""
Helper functions shared across coalsim.

Record collections, number formatting that renders floats identically on
every run, and atomic file writes.
"""

import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Optional, Union

from .collection import RecordCollection


def collect(items: Optional[Iterable[Any]] = None) -> RecordCollection:
    """Wrap records in a RecordCollection."""
    return RecordCollection(items)


def format_float(value: Any) -> str:
    """
    Render a number for CSV output.

    Integral floats print without a fractional part, other floats use their
    shortest round-trip repr; None prints as an empty field.
    """
    if value is None:
        return ''
    if isinstance(value, bool):
        return '1' if value else '0'
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def json_safe(value: Any) -> Any:
    """Replace non-finite floats by None, recursively, for strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if hasattr(value, 'item') and callable(value.item):
        return json_safe(value.item())
    return value


def atomic_write(path: Union[str, Path], content: str) -> Path:
    """
    Write text through a temporary file in the target directory and rename
    it into place.

    Returns:
        The written path
    """
    path = Path(path)
    directory = path.parent if str(path.parent) else Path('.')
    directory.mkdir(parents=True, exist_ok=True)
    handle, temporary = tempfile.mkstemp(prefix=f'.{path.name}.', suffix='.tmp', dir=directory)
    try:
        with os.fdopen(handle, 'w', encoding='utf-8', newline='') as stream:
            stream.write(content)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.unlink(temporary)
        raise
    return path
