"""ARC and CAR, following their published formulations.

Both keep the target size ``p`` as an integer; ``max(1, |B_j| / |B_i|)`` uses
floor division, the same convention as :mod:`icn_cache_lab.compact_car`.
"""

from __future__ import annotations

from collections import OrderedDict

from ..kernel import HIT, MISS, AccessOutcome, ChunkId, Kind, Policy

_MISS = Kind.MISS
_GHOST = Kind.GHOST_HIT


class Arc(Policy):
    name = "arc"

    def __init__(self, capacity: int) -> None:
        super().__init__(capacity)
        # every list is ordered LRU first, MRU last
        self.t1: OrderedDict[ChunkId, None] = OrderedDict()
        self.t2: OrderedDict[ChunkId, None] = OrderedDict()
        self.b1: OrderedDict[ChunkId, None] = OrderedDict()
        self.b2: OrderedDict[ChunkId, None] = OrderedDict()
        self.p = 0

    def _replace(self, in_b2: bool) -> ChunkId:
        t1 = self.t1
        if t1 and (len(t1) > self.p or (in_b2 and len(t1) == self.p)):
            y, _ = t1.popitem(last=False)
            self.b1[y] = None
        else:
            y, _ = self.t2.popitem(last=False)
            self.b2[y] = None
        return y

    def access(self, x: ChunkId) -> AccessOutcome:
        t1, t2, b1, b2 = self.t1, self.t2, self.b1, self.b2
        c = self.capacity
        if x in t1:
            del t1[x]
            t2[x] = None
            return HIT
        if x in t2:
            t2.move_to_end(x)
            return HIT
        if x in b1:
            self.p = min(c, self.p + max(1, len(b2) // len(b1)))
            victim = self._replace(False)
            del b1[x]
            t2[x] = None
            return AccessOutcome(_GHOST, victim)
        if x in b2:
            self.p = max(0, self.p - max(1, len(b1) // len(b2)))
            victim = self._replace(True)
            del b2[x]
            t2[x] = None
            return AccessOutcome(_GHOST, victim)
        victim = None
        l1 = len(t1) + len(b1)
        if l1 == c:
            if len(t1) < c:
                b1.popitem(last=False)
                victim = self._replace(False)
            else:
                victim, _ = t1.popitem(last=False)
        else:
            total = l1 + len(t2) + len(b2)
            if total >= c:
                if total == 2 * c:
                    b2.popitem(last=False)
                victim = self._replace(False)
        t1[x] = None
        return MISS if victim is None else AccessOutcome(_MISS, victim)

    def __contains__(self, x: ChunkId) -> bool:
        return x in self.t1 or x in self.t2

    def resident(self) -> set[ChunkId]:
        return set(self.t1) | set(self.t2)


class Car(Policy):
    """CLOCK with Adaptive Replacement on linked lists (the reference CAR).

    T1/T2 are CLOCKs whose head (first item) sits under the hand; B1/B2 are
    LRU ghost lists. Values of ``t1``/``t2`` are R-bits.
    """

    name = "car"

    def __init__(self, capacity: int) -> None:
        super().__init__(capacity)
        self.t1: OrderedDict[ChunkId, int] = OrderedDict()
        self.t2: OrderedDict[ChunkId, int] = OrderedDict()
        self.b1: OrderedDict[ChunkId, None] = OrderedDict()
        self.b2: OrderedDict[ChunkId, None] = OrderedDict()
        self.p = 0

    def target_q(self) -> float:
        return self.p / self.capacity

    def _replace(self) -> tuple[ChunkId, int]:
        t1, t2 = self.t1, self.t2
        moves = 0
        while True:
            moves += 1
            if len(t1) >= max(1, self.p):
                y = next(iter(t1))
                if t1[y] == 0:
                    del t1[y]
                    self.b1[y] = None
                    return y, moves
                del t1[y]
                t2[y] = 0
            else:
                y = next(iter(t2))
                if t2[y] == 0:
                    del t2[y]
                    self.b2[y] = None
                    return y, moves
                t2[y] = 0
                t2.move_to_end(y)

    def access(self, x: ChunkId) -> AccessOutcome:
        t1, t2, b1, b2 = self.t1, self.t2, self.b1, self.b2
        c = self.capacity
        if x in t1:
            t1[x] = 1
            return HIT
        if x in t2:
            t2[x] = 1
            return HIT
        in_b1 = x in b1
        in_b2 = not in_b1 and x in b2
        victim = None
        moves = 0
        if len(t1) + len(t2) == c:
            victim, moves = self._replace()
            if not (in_b1 or in_b2):
                if len(t1) + len(b1) == c:
                    b1.popitem(last=False)
                elif len(t1) + len(t2) + len(b1) + len(b2) == 2 * c:
                    b2.popitem(last=False)
        if in_b1:
            self.p = min(self.p + max(1, len(b2) // len(b1)), c)
            del b1[x]
            t2[x] = 0
            return AccessOutcome(_GHOST, victim, moves)
        if in_b2:
            self.p = max(self.p - max(1, len(b1) // len(b2)), 0)
            del b2[x]
            t2[x] = 0
            return AccessOutcome(_GHOST, victim, moves)
        t1[x] = 0
        return AccessOutcome(_MISS, victim, moves)

    def __contains__(self, x: ChunkId) -> bool:
        return x in self.t1 or x in self.t2

    def resident(self) -> set[ChunkId]:
        return set(self.t1) | set(self.t2)
