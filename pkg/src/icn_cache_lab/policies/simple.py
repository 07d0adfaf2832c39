"""FIFO, CLOCK, LRU and LFU."""

from __future__ import annotations

import heapq
from collections import OrderedDict, deque
from typing import Optional

from ..kernel import HIT, MISS, AccessOutcome, ChunkId, Kind, Policy

_MISS = Kind.MISS


class Fifo(Policy):
    name = "fifo"

    def __init__(self, capacity: int) -> None:
        super().__init__(capacity)
        self._queue: deque[ChunkId] = deque()
        self._members: set[ChunkId] = set()

    def access(self, x: ChunkId) -> AccessOutcome:
        if x in self._members:
            return HIT
        evicted = None
        if len(self._queue) == self.capacity:
            evicted = self._queue.popleft()
            self._members.discard(evicted)
        self._queue.append(x)
        self._members.add(x)
        return MISS if evicted is None else AccessOutcome(_MISS, evicted)

    def __contains__(self, x: ChunkId) -> bool:
        return x in self._members

    def resident(self) -> set[ChunkId]:
        return set(self._members)


class Clock(Policy):
    """Circular buffer with one R-bit per entry; bits are cleared as the hand passes."""

    name = "clock"

    def __init__(self, capacity: int) -> None:
        super().__init__(capacity)
        self.ids: list[Optional[ChunkId]] = [None] * capacity
        self.bits = bytearray(capacity)
        self.slot: dict[ChunkId, int] = {}
        self.hand = 0
        self.size = 0

    def access(self, x: ChunkId) -> AccessOutcome:
        s = self.slot.get(x)
        if s is not None:
            self.bits[s] = 1
            return HIT
        if self.size < self.capacity:
            s = self.size
            self.size += 1
            self.ids[s] = x
            self.bits[s] = 0
            self.slot[x] = s
            return MISS
        bits = self.bits
        c = self.capacity
        h = self.hand
        moves = 0
        while bits[h]:
            bits[h] = 0
            h += 1
            if h == c:
                h = 0
            moves += 1
        victim = self.ids[h]
        del self.slot[victim]
        self.ids[h] = x
        self.slot[x] = h
        h += 1
        self.hand = 0 if h == c else h
        return AccessOutcome(_MISS, victim, moves + 1)

    def __contains__(self, x: ChunkId) -> bool:
        return x in self.slot

    def resident(self) -> set[ChunkId]:
        return set(self.slot)


class Lru(Policy):
    name = "lru"

    def __init__(self, capacity: int) -> None:
        super().__init__(capacity)
        # oldest first; most recent at the end
        self._order: OrderedDict[ChunkId, None] = OrderedDict()

    def access(self, x: ChunkId) -> AccessOutcome:
        order = self._order
        if x in order:
            order.move_to_end(x)
            return HIT
        evicted = None
        if len(order) == self.capacity:
            evicted, _ = order.popitem(last=False)
        order[x] = None
        return MISS if evicted is None else AccessOutcome(_MISS, evicted)

    def __contains__(self, x: ChunkId) -> bool:
        return x in self._order

    def resident(self) -> set[ChunkId]:
        return set(self._order)

    def recency(self) -> list[ChunkId]:
        """Residents, most recent first."""
        return list(reversed(self._order))


class Lfu(Policy):
    """Min-count eviction; ties go to the least recently inserted entry.

    Counts live only while a chunk is resident. The heap holds stale
    ``(count, insert_seq, chunk)`` entries that are skipped lazily.
    """

    name = "lfu"

    def __init__(self, capacity: int) -> None:
        super().__init__(capacity)
        self.counts: dict[ChunkId, int] = {}
        self._seq: dict[ChunkId, int] = {}
        self._heap: list[tuple[int, int, ChunkId]] = []
        self._next_seq = 0

    def access(self, x: ChunkId) -> AccessOutcome:
        counts = self.counts
        if x in counts:
            n = counts[x] + 1
            counts[x] = n
            heapq.heappush(self._heap, (n, self._seq[x], x))
            if len(self._heap) > 4 * self.capacity + 16:
                self._compact()
            return HIT
        evicted = None
        if len(counts) == self.capacity:
            heap = self._heap
            while True:
                n, seq, y = heapq.heappop(heap)
                if counts.get(y) == n and self._seq[y] == seq:
                    break
            evicted = y
            del counts[y]
            del self._seq[y]
        counts[x] = 1
        self._seq[x] = self._next_seq
        heapq.heappush(self._heap, (1, self._next_seq, x))
        self._next_seq += 1
        return MISS if evicted is None else AccessOutcome(_MISS, evicted)

    def _compact(self) -> None:
        self._heap = [(n, self._seq[y], y) for y, n in self.counts.items()]
        heapq.heapify(self._heap)

    def __contains__(self, x: ChunkId) -> bool:
        return x in self.counts

    def resident(self) -> set[ChunkId]:
        return set(self.counts)
