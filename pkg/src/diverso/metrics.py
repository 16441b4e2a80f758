"""Logical memory accounting for engine data structures.

Memory is measured by a structure census, not allocator introspection:
each live entry is charged a fixed unit cost per field (8 units for a
vertex id, a score, a weight, or a bitmask). Graph and tf-idf storage are
deliberately excluded so numbers compare across implementations.
"""

from __future__ import annotations

UNIT_ID = 8
UNIT_SCORE = 8
UNIT_WEIGHT = 8
UNIT_MASK = 8


class MemoryMeter:
    """Tracks the peak logical byte census over a set of live structures.

    Structures register an object exposing `logical_bytes()`; the pipeline
    releases them explicitly when a search branch dies so peaks stay
    deterministic (no reliance on garbage collection timing).
    """

    def __init__(self):
        self._live: list = []
        self.peak = 0
        self.extra = 0  # census of caller-owned collections, set directly

    def register(self, obj) -> None:
        self._live.append(obj)
        self.checkpoint()

    def release(self, obj) -> None:
        try:
            self._live.remove(obj)
        except ValueError:
            pass

    def current(self) -> int:
        return self.extra + sum(o.logical_bytes() for o in self._live)

    def checkpoint(self) -> int:
        cur = self.current()
        if cur > self.peak:
            self.peak = cur
        return cur
