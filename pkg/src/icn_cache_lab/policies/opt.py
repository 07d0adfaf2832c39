"""Belady's offline optimal policy over a known request stream."""

from __future__ import annotations

import heapq
from typing import Sequence

from ..kernel import HIT, MISS, AccessOutcome, ChunkId, Kind, Policy


def next_use_positions(stream: Sequence[ChunkId]) -> list[int]:
    """``out[k]`` is the next position of ``stream[k]``, or ``len(stream)`` if none."""
    n = len(stream)
    out = [n] * n
    last: dict[ChunkId, int] = {}
    for k in range(n - 1, -1, -1):
        x = stream[k]
        out[k] = last.get(x, n)
        last[x] = k
    return out


class Opt(Policy):
    """Evicts the resident whose next use is farthest (ties: smaller slot).

    With ``bypass`` the incoming chunk is not cached when its own next use is
    later than every resident's, which makes the hit count a true upper bound.
    The policy must be replayed over exactly the stream it was built with.
    """

    name = "opt"

    def __init__(self, capacity: int, stream: Sequence[ChunkId], *, bypass: bool = True) -> None:
        super().__init__(capacity)
        self.stream = list(stream)
        self.next_use = next_use_positions(self.stream)
        self.bypass = bypass
        self.pos = 0
        self.slot_of: dict[ChunkId, int] = {}
        self.nu: dict[ChunkId, int] = {}
        self._heap: list[tuple[int, int, ChunkId]] = []
        self.bypassed = 0

    def access(self, x: ChunkId) -> AccessOutcome:
        k = self.pos
        if k >= len(self.stream):
            raise IndexError(f"OPT replayed past the end of its stream (position {k})")
        if self.stream[k] != x:
            raise ValueError(f"OPT expected chunk {self.stream[k]} at position {k}, got {x}")
        self.pos = k + 1
        nxt = self.next_use[k]
        slot_of = self.slot_of
        if x in slot_of:
            self.nu[x] = nxt
            heapq.heappush(self._heap, (-nxt, slot_of[x], x))
            return HIT
        if len(slot_of) < self.capacity:
            s = len(slot_of)
            slot_of[x] = s
            self.nu[x] = nxt
            heapq.heappush(self._heap, (-nxt, s, x))
            return MISS
        heap = self._heap
        while True:
            entry = heapq.heappop(heap)
            key, s, y = entry
            if slot_of.get(y) == s and self.nu[y] == -key:
                break
        if self.bypass and nxt > -key:
            heapq.heappush(heap, entry)
            self.bypassed += 1
            return MISS
        del slot_of[y]
        del self.nu[y]
        slot_of[x] = s
        self.nu[x] = nxt
        heapq.heappush(heap, (-nxt, s, x))
        if len(heap) > 4 * self.capacity + 16:
            self._heap = [(-self.nu[z], t, z) for z, t in slot_of.items()]
            heapq.heapify(self._heap)
        return AccessOutcome(Kind.MISS, y)

    def __contains__(self, x: ChunkId) -> bool:
        return x in self.slot_of

    def resident(self) -> set[ChunkId]:
        return set(self.slot_of)
