"""
Weighted site selection.

A Fenwick tree over integer weights with slot allocation, so that sites can
enter and leave the table as they become (un)occupied. Weights are the pair
counts k(k-1)/2 of the sites, kept as integers so that the running total is
exact.
"""

from typing import Dict, Generic, Hashable, List, TypeVar

Key = TypeVar('Key', bound=Hashable)


class FenwickTree:
    """
    Cumulative frequency table over indexes 1..max_index.

    find(v) returns the smallest index whose cumulative sum reaches v, which
    skips zero-weight entries as long as v > 0.
    """

    def __init__(self, max_index: int):
        if max_index < 1:
            raise ValueError(f"Fenwick tree needs max_index >= 1, got {max_index}")
        self.max_index = max_index
        self._tree = [0] * (max_index + 1)
        self._value = [0] * (max_index + 1)
        u = max_index
        while u != 0:
            self._log_max_index = u
            u -= u & -u

    def total(self) -> int:
        return self.cumulative_sum(self.max_index)

    def increment(self, index: int, v: int) -> None:
        self._value[index] += v
        j = index
        while j <= self.max_index:
            self._tree[j] += v
            j += j & -j

    def set_value(self, index: int, v: int) -> None:
        self.increment(index, v - self._value[index])

    def value(self, index: int) -> int:
        return self._value[index]

    def cumulative_sum(self, index: int) -> int:
        j = index
        s = 0
        while j > 0:
            s += self._tree[j]
            j -= j & -j
        return s

    def find(self, v: float) -> int:
        j = 0
        s = v
        half = self._log_max_index
        while half > 0:
            while j + half > self.max_index:
                half >>= 1
            k = j + half
            if s > self._tree[k]:
                j = k
                s -= self._tree[j]
            half >>= 1
        return j + 1


class WeightedKeys(Generic[Key]):
    """
    Integer weights attached to hashable keys, with weighted sampling.

    Keys get a slot on first positive weight and release it when their
    weight returns to zero; the tree doubles its capacity when full.
    """

    def __init__(self, capacity: int = 64):
        self._tree = FenwickTree(capacity)
        self._slots: Dict[Key, int] = {}
        self._keys: List = [None] * (capacity + 1)
        self._free: List[int] = list(range(capacity, 0, -1))
        self.total = 0

    def __len__(self) -> int:
        return len(self._slots)

    def __contains__(self, key) -> bool:
        return key in self._slots

    def weight(self, key: Key) -> int:
        slot = self._slots.get(key)
        return 0 if slot is None else self._tree.value(slot)

    def set(self, key: Key, weight: int) -> None:
        slot = self._slots.get(key)
        if slot is None:
            if weight == 0:
                return
            if not self._free:
                self._grow()
            slot = self._free.pop()
            self._slots[key] = slot
            self._keys[slot] = key

        self.total += weight - self._tree.value(slot)
        self._tree.set_value(slot, weight)

        if weight == 0:
            del self._slots[key]
            self._keys[slot] = None
            self._free.append(slot)

    def find(self, v: float) -> Key:
        """Key whose cumulative weight interval contains v, for 0 < v <= total."""
        return self._keys[self._tree.find(v)]

    def items(self):
        return ((key, self._tree.value(slot)) for key, slot in self._slots.items())

    def recomputed_total(self) -> int:
        return sum(self._tree.value(slot) for slot in self._slots.values())

    def _grow(self) -> None:
        old = self._tree
        capacity = old.max_index * 2
        self._tree = FenwickTree(capacity)
        for slot in self._slots.values():
            self._tree.set_value(slot, old.value(slot))
        self._keys.extend([None] * (capacity - old.max_index))
        self._free.extend(range(capacity, old.max_index, -1))
