"""LIRS: Low Inter-reference Recency Set replacement."""

from __future__ import annotations

import heapq
from collections import OrderedDict
from typing import Optional

from ..kernel import HIT, MISS, AccessOutcome, ChunkId, Kind, Policy

_MISS = Kind.MISS
_GHOST = Kind.GHOST_HIT


class Lirs(Policy):
    """LIRS with a bounded number of non-resident (ghost) stack entries.

    ``stack`` is S (bottom first, top last) and ``queue`` is Q (front first),
    holding resident HIR chunks. At most ``ghost_limit`` ghosts are kept in S;
    beyond that the oldest ghost is dropped.
    """

    name = "lirs"

    def __init__(
        self,
        capacity: int,
        *,
        hir_fraction: float = 0.01,
        ghost_limit: Optional[int] = None,
    ) -> None:
        super().__init__(capacity)
        self.hir_capacity = max(1, round(hir_fraction * capacity))
        if self.hir_capacity >= capacity:
            self.hir_capacity = 1
        self.lir_capacity = capacity - self.hir_capacity
        self.ghost_limit = 4 * capacity if ghost_limit is None else ghost_limit
        self.stack: OrderedDict[ChunkId, None] = OrderedDict()
        self.queue: OrderedDict[ChunkId, None] = OrderedDict()
        self.lir: set[ChunkId] = set()
        self.ghosts: dict[ChunkId, int] = {}
        self._stamp: dict[ChunkId, int] = {}
        self._ghost_heap: list[tuple[int, ChunkId]] = []
        self._clock = 0
        # (entries removed, ghosts before, resident HIR in S before) per prune
        self.max_prune = 0
        self.prune_log: list[tuple[int, int, int]] = []
        self.keep_prune_log = False

    def _push_top(self, x: ChunkId) -> None:
        self._clock += 1
        self._stamp[x] = self._clock
        self.stack[x] = None
        self.stack.move_to_end(x)

    def _prune(self) -> None:
        stack = self.stack
        ghosts_before = len(self.ghosts)
        hir_before = sum(1 for y in self.queue if y in stack) if self.keep_prune_log else 0
        removed = 0
        while stack:
            y = next(iter(stack))
            if y in self.lir:
                break
            del stack[y]
            del self._stamp[y]
            self.ghosts.pop(y, None)
            removed += 1
        if removed > self.max_prune:
            self.max_prune = removed
        if self.keep_prune_log:
            self.prune_log.append((removed, ghosts_before, hir_before))

    def _demote_bottom_lir(self) -> None:
        y, _ = self.stack.popitem(last=False)
        del self._stamp[y]
        self.lir.discard(y)
        self.queue[y] = None
        self._prune()

    def _limit_ghosts(self) -> None:
        heap = self._ghost_heap
        while len(self.ghosts) > self.ghost_limit:
            stamp, y = heapq.heappop(heap)
            if self.ghosts.get(y) == stamp:
                del self.ghosts[y]
                del self.stack[y]
                del self._stamp[y]
        if len(heap) > 4 * self.ghost_limit + 16:
            self._ghost_heap = [(s, y) for y, s in self.ghosts.items()]
            heapq.heapify(self._ghost_heap)

    def access(self, x: ChunkId) -> AccessOutcome:
        stack, queue, lir = self.stack, self.queue, self.lir
        if x in lir:
            was_bottom = next(iter(stack)) == x
            self._push_top(x)
            if was_bottom:
                self._prune()
            return HIT
        if x in queue:
            if x in stack and self.lir_capacity > 0:
                self._push_top(x)
                del queue[x]
                lir.add(x)
                self._demote_bottom_lir()
            else:
                self._push_top(x)
                queue.move_to_end(x)
            return HIT

        if len(lir) < self.lir_capacity:
            lir.add(x)
            self._push_top(x)
            return MISS
        victim = None
        if len(lir) + len(queue) == self.capacity:
            victim, _ = queue.popitem(last=False)
            if victim in stack:
                stamp = self._stamp[victim]
                self.ghosts[victim] = stamp
                heapq.heappush(self._ghost_heap, (stamp, victim))
        if x in self.ghosts:
            del self.ghosts[x]
            self._push_top(x)
            if self.lir_capacity > 0:
                lir.add(x)
                self._demote_bottom_lir()
            else:
                queue[x] = None
            self._limit_ghosts()
            return AccessOutcome(_GHOST, victim)
        self._push_top(x)
        queue[x] = None
        self._limit_ghosts()
        return MISS if victim is None else AccessOutcome(_MISS, victim)

    def __contains__(self, x: ChunkId) -> bool:
        return x in self.lir or x in self.queue

    def resident(self) -> set[ChunkId]:
        return self.lir | set(self.queue)
