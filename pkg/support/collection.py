"""
Fluent collection of result records.

RecordCollection wraps a list of records (or any objects with attributes)
and offers the filtering, grouping and plucking the summaries need, with
method chaining.
"""

import operator
from typing import Any, Callable, Dict, Iterable, List, Optional, Union

OPERATORS: Dict[str, Callable[[Any, Any], bool]] = {
    '=': operator.eq,
    '==': operator.eq,
    '!=': operator.ne,
    '>': operator.gt,
    '>=': operator.ge,
    '<': operator.lt,
    '<=': operator.le,
    'in': lambda x, y: x in y,
    'not in': lambda x, y: x not in y,
}

_MISSING = object()


class RecordCollection:
    """
    A fluent wrapper around a list of records.

    Every transforming method returns a new collection; the wrapped list is
    never modified.
    """

    def __init__(self, items: Optional[Iterable[Any]] = None):
        self._items: List[Any] = list(items) if items is not None else []

    def filter(self, callback: Callable[[Any], bool]) -> "RecordCollection":
        return RecordCollection(item for item in self._items if callback(item))

    def where(self, key: str, operator_or_value: Any = _MISSING,
              value: Any = _MISSING) -> "RecordCollection":
        """
        Filter items by an attribute.

        Both where('statistic', 'count') and where('beta', '>', 0.5) are
        accepted. Items lacking the attribute are dropped.

        Raises:
            ValueError: If the operator is unknown
        """
        if value is _MISSING:
            op, target = operator.eq, operator_or_value
        else:
            if operator_or_value not in OPERATORS:
                raise ValueError(f"unknown comparison operator '{operator_or_value}'")
            op, target = OPERATORS[operator_or_value], value

        def check(item):
            item_value = getattr(item, key, _MISSING)
            if item_value is _MISSING:
                return False
            try:
                return op(item_value, target)
            except TypeError:
                return False

        return self.filter(check)

    def pluck(self, key: str) -> List[Any]:
        """Values of one attribute, skipping items without it."""
        return [getattr(item, key) for item in self._items if hasattr(item, key)]

    def values(self) -> List[float]:
        """The `value` attribute of every record."""
        return self.pluck('value')

    def group_by(self, key: Union[str, Callable[[Any], Any]]) -> Dict[Any, "RecordCollection"]:
        """
        Group items by an attribute or a key function.

        Returns:
            Groups in first-seen order
        """
        key_of = key if callable(key) else operator.attrgetter(key)
        groups: Dict[Any, List[Any]] = {}
        for item in self._items:
            groups.setdefault(key_of(item), []).append(item)
        return {group: RecordCollection(items) for group, items in groups.items()}

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    def __getitem__(self, index) -> Any:
        return self._items[index]

    def __repr__(self) -> str:
        return f"RecordCollection({self._items!r})"
