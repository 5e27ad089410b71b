"""
Result files.

Records are written as CSV with one row per observation; summaries as a
JSON object. Files are replaced atomically, never appended to.
"""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, Sequence, Union

from ..support.helpers import atomic_write, format_float, json_safe
from .scenario import RECORD_FIELDS, ResultRecord


def render_csv(records: Sequence[ResultRecord]) -> str:
    """CSV text of the records, header included."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(RECORD_FIELDS)
    for record in records:
        writer.writerow([value if isinstance(value, str) else format_float(value)
                         for value in record.row()])
    return buffer.getvalue()


def render_summary(summary: Dict[str, Any]) -> str:
    return json.dumps(json_safe(summary), indent=2, sort_keys=True, allow_nan=False) + '\n'


def write_records(records: Sequence[ResultRecord], path: Union[str, Path]) -> Path:
    return atomic_write(path, render_csv(records))


def write_summary(summary: Dict[str, Any], path: Union[str, Path]) -> Path:
    return atomic_write(path, render_summary(summary))
