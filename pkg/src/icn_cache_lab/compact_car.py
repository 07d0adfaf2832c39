"""Compact CAR: CLOCK-based adaptive replacement over two fixed-size buffers.

Layout (``c`` slots each)::

    top:     [ T1 --> ...free... <-- T2 ]     resident chunks + R-bits
    bottom:  [ B1 --> ...free... <-- B2 ]     ghost ids only

Every list is addressed through a *logical* index counted from the outer end
of the buffer, so the last logical index is the list's edge (the slot next to
the boundary). Physical slot of logical ``j`` is ``j`` for T1/B1 and
``c - 1 - j`` for T2/B2. Hands hold logical positions; rotating a hand moves
it one step toward the edge and wraps to the outer end.

Removing an entry always swaps it with the edge entry first, so the freed
slot sits on the boundary and can be adopted by either neighbouring list.
"""

from __future__ import annotations

import decimal
from typing import Iterable, Optional, Sequence

from .kernel import AccessOutcome, ChunkId, DirectoryIndex, HIT, Kind, Policy, Region

T1, T2, B1, B2 = Region.T1, Region.T2, Region.B1, Region.B2
_MISS = Kind.MISS
_GHOST = Kind.GHOST_HIT


class InvariantError(AssertionError):
    pass


def fixed_target(q: float, capacity: int) -> int:
    """``round(q * capacity)`` with ties rounded up."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    exact = decimal.Decimal(repr(q)) * capacity
    return int(exact.quantize(decimal.Decimal(1), rounding=decimal.ROUND_HALF_UP))


class CompactCar(Policy):
    name = "compact-car"

    def __init__(self, capacity: int, *, debug: bool = False) -> None:
        super().__init__(capacity)
        c = capacity
        self.c = c
        self.top_ids: list[Optional[ChunkId]] = [None] * c
        self.top_bits = bytearray(c)
        self.bottom_ids: list[Optional[ChunkId]] = [None] * c
        self.t1_len = 0
        self.t2_len = 0
        self.b1_len = 0
        self.b2_len = 0
        self.hand_t1 = 0
        self.hand_t2 = 0
        self.hand_b1 = 0
        self.hand_b2 = 0
        self.p = 0
        self.adaptive = True
        self.debug = debug
        self.index = DirectoryIndex()
        self._loc = self.index.raw()
        self._moves = 0
        self._victim: Optional[ChunkId] = None
        # chunks entering T2, split by route
        self.t2_entries_ghost = 0
        self.t2_entries_promoted = 0

    # -- contract ---------------------------------------------------------

    def __contains__(self, chunk: ChunkId) -> bool:
        loc = self._loc.get(chunk)
        return loc is not None and (loc & 3) < 2

    def resident(self) -> set[ChunkId]:
        return {k for k, loc in self._loc.items() if (loc & 3) < 2}

    def ghosts(self) -> set[ChunkId]:
        return {k for k, loc in self._loc.items() if (loc & 3) >= 2}

    def __len__(self) -> int:
        return self.t1_len + self.t2_len

    def target_q(self) -> float:
        return self.p / self.c

    def access(self, x: ChunkId) -> AccessOutcome:
        loc = self._loc.get(x)
        c = self.c
        if loc is not None:
            region = loc & 3
            if region < 2:
                self.top_bits[loc >> 2] = 1
                return HIT
            target = T2
            kind = _GHOST
            if region == B1:
                if self.adaptive:
                    delta = max(1, self.b2_len // self.b1_len)
                    self.p = min(c, self.p + delta)
                self._discard_btm_slot(B1, loc >> 2)
            else:
                if self.adaptive:
                    delta = max(1, self.b1_len // self.b2_len)
                    self.p = max(0, self.p - delta)
                self._discard_btm_slot(B2, loc >> 2)
        else:
            target = T1
            kind = _MISS
            if self.t1_len + self.b1_len == c and self.b1_len > 0:
                self.replace_btm(1)
            elif self.t1_len + self.t2_len + self.b1_len + self.b2_len == 2 * c and self.b2_len > 0:
                self.replace_btm(2)

        self._moves = 0
        self._victim = None
        if self.t1_len + self.t2_len == c:
            if self.t1_len >= max(self.p, 1):
                if self.replace_top(1, insert_into=target) is None:
                    # T1 drained by promotions; the victim has to come from T2
                    self.replace_top(2, insert_into=target)
            else:
                self.replace_top(2, insert_into=target)
        self._insert(target, x)
        if self.debug:
            self.check_invariants()
        if self._victim is None and self._moves == 0:
            return AccessOutcome(kind)
        return AccessOutcome(kind, self._victim, self._moves)

    # -- buffer primitives --------------------------------------------------

    def _swap_top(self, s: int, e: int) -> None:
        if s == e:
            return
        ids = self.top_ids
        bits = self.top_bits
        a = ids[s]
        b = ids[e]
        ids[s] = b
        ids[e] = a
        bits[s], bits[e] = bits[e], bits[s]
        loc = self._loc
        region = loc[a] & 3
        loc[a] = (e << 2) | region
        loc[b] = (s << 2) | region

    def _swap_bottom(self, s: int, e: int) -> None:
        if s == e:
            return
        ids = self.bottom_ids
        a = ids[s]
        b = ids[e]
        ids[s] = b
        ids[e] = a
        loc = self._loc
        region = loc[a] & 3
        loc[a] = (e << 2) | region
        loc[b] = (s << 2) | region

    def edge_slot(self, region: Region) -> int:
        """Physical slot of ``region``'s edge entry (its list must be non-empty)."""
        c = self.c
        if region == T1:
            n = self.t1_len
            assert n > 0, "T1 is empty"
            return n - 1
        if region == T2:
            n = self.t2_len
            assert n > 0, "T2 is empty"
            return c - n
        if region == B1:
            n = self.b1_len
            assert n > 0, "B1 is empty"
            return n - 1
        n = self.b2_len
        assert n > 0, "B2 is empty"
        return c - n

    def _occupied(self, region: Region, slot: int) -> bool:
        c = self.c
        if region == T1:
            return 0 <= slot < self.t1_len
        if region == T2:
            return c - self.t2_len <= slot < c
        if region == B1:
            return 0 <= slot < self.b1_len
        return c - self.b2_len <= slot < c

    def edge_swap(self, region: Region, slot: int) -> None:
        """Exchange the entry at physical ``slot`` with its list's edge entry."""
        region = Region(region)
        assert self._occupied(region, slot), f"slot {slot} outside {region.name}"
        edge = self.edge_slot(region)
        if region < 2:
            self._swap_top(slot, edge)
        else:
            self._swap_bottom(slot, edge)

    def _insert(self, region: Region, x: ChunkId) -> int:
        if region == T1:
            s = self.t1_len
            self.t1_len += 1
        else:
            s = self.c - 1 - self.t2_len
            self.t2_len += 1
            self.t2_entries_ghost += 1
        assert self.top_ids[s] is None, "insertion slot is occupied"
        self.top_ids[s] = x
        self.top_bits[s] = 0
        self._loc[x] = (s << 2) | region
        return s

    # -- history lists ------------------------------------------------------

    def discard_btm(self, i: int, x: ChunkId) -> None:
        """Drop ghost ``x`` from B_i (after moving it to B_i's edge)."""
        region = B1 if i == 1 else B2
        loc = self._loc.get(x)
        assert loc is not None and (loc & 3) == region, f"{x} is not in B{i}"
        self._discard_btm_slot(region, loc >> 2)

    def _discard_btm_slot(self, region: int, s: int) -> None:
        if region == B1:
            edge = self.b1_len - 1
        else:
            edge = self.c - self.b2_len
        self._swap_bottom(s, edge)
        x = self.bottom_ids[edge]
        self.bottom_ids[edge] = None
        del self._loc[x]
        if region == B1:
            self.b1_len -= 1
            if self.hand_b1 >= self.b1_len:
                self.hand_b1 = 0
        else:
            self.b2_len -= 1
            if self.hand_b2 >= self.b2_len:
                self.hand_b2 = 0

    def replace_btm(self, i: int) -> ChunkId:
        """Discard the ghost under B_i's hand; returns the discarded id."""
        c = self.c
        if i == 1:
            assert self.b1_len > 0, "ReplaceBtm on empty B1"
            h = self.hand_b1
            self._swap_bottom(h, self.b1_len - 1)
            edge = self.b1_len - 1
            self.b1_len -= 1
            h += 1
            self.hand_b1 = 0 if h >= self.b1_len else h
        else:
            assert self.b2_len > 0, "ReplaceBtm on empty B2"
            h = self.hand_b2
            self._swap_bottom(c - 1 - h, c - self.b2_len)
            edge = c - self.b2_len
            self.b2_len -= 1
            h += 1
            self.hand_b2 = 0 if h >= self.b2_len else h
        x = self.bottom_ids[edge]
        self.bottom_ids[edge] = None
        del self._loc[x]
        return x

    # -- resident lists -----------------------------------------------------

    def replace_top(self, i: int, insert_into: int = T1) -> Optional[int]:
        """Sweep Hand_{T_i} and free one slot on the T1/T2 boundary.

        Returns the freed physical slot, or ``None`` when a T1 sweep promoted
        every T1 entry to T2 and left nothing to evict. ``insert_into`` is the
        list that will adopt the freed slot; it decides whether a T1 victim
        can still be remembered in B1 without L1 exceeding ``c``.
        The victim and hand rotations accumulate on ``self._victim`` and
        ``self._moves``.
        """
        c = self.c
        ids = self.top_ids
        bits = self.top_bits
        loc = self._loc
        assert self.t1_len + self.t2_len == c, "ReplaceTop requires a full cache"
        if i == 1:
            if self.t1_len == 0:
                return None
            h = self.hand_t1
            while bits[h]:
                bits[h] = 0
                edge = self.t1_len - 1
                self._swap_top(h, edge)
                # boundary shifts left: the old T1 edge slot now belongs to T2
                self.t1_len = edge
                self.t2_len += 1
                loc[ids[edge]] = (edge << 2) | T2
                self.t2_entries_promoted += 1
                h += 1
                self._moves += 1
                if h >= self.t1_len:
                    h = 0
                if self.t1_len == 0:
                    self.hand_t1 = 0
                    return None
            s = h
            edge = self.t1_len - 1
        else:
            if self.t2_len == 0:
                return None
            h = self.hand_t2
            n = self.t2_len
            while bits[c - 1 - h]:
                bits[c - 1 - h] = 0
                h += 1
                self._moves += 1
                if h >= n:
                    h = 0
            s = c - 1 - h
            edge = c - n

        self._swap_top(s, edge)
        victim = ids[edge]
        ids[edge] = None
        bits[edge] = 0
        if i == 1:
            self.t1_len -= 1
            keep = self.t1_len + (insert_into == T1) + self.b1_len + 1 <= c
        else:
            self.t2_len -= 1
            keep = True
        if keep:
            assert self.b1_len + self.b2_len < c, "no free ghost slot"
            if i == 1:
                gs = self.b1_len
                self.b1_len += 1
                loc[victim] = (gs << 2) | B1
            else:
                gs = c - 1 - self.b2_len
                self.b2_len += 1
                loc[victim] = (gs << 2) | B2
            self.bottom_ids[gs] = victim
        else:
            del loc[victim]
        h += 1
        self._moves += 1
        if i == 1:
            self.hand_t1 = 0 if h >= self.t1_len else h
        else:
            self.hand_t2 = 0 if h >= self.t2_len else h
        self._victim = victim
        return edge

    # -- diagnostics ----------------------------------------------------------

    def hand_slot(self, region: Region) -> Optional[int]:
        """Physical slot under ``region``'s hand, or None if the list is empty."""
        c = self.c
        if region == T1:
            return self.hand_t1 if self.t1_len else None
        if region == T2:
            return c - 1 - self.hand_t2 if self.t2_len else None
        if region == B1:
            return self.hand_b1 if self.b1_len else None
        return c - 1 - self.hand_b2 if self.b2_len else None

    def lists(self) -> dict[str, list]:
        """Logical contents (outer end first, edge last) of all four lists."""
        c = self.c
        return {
            "T1": [(self.top_ids[j], self.top_bits[j]) for j in range(self.t1_len)],
            "T2": [(self.top_ids[c - 1 - j], self.top_bits[c - 1 - j]) for j in range(self.t2_len)],
            "B1": [self.bottom_ids[j] for j in range(self.b1_len)],
            "B2": [self.bottom_ids[c - 1 - j] for j in range(self.b2_len)],
        }

    def check_invariants(self) -> None:
        """Full rescan of buffers against lengths, hands, bounds and directory."""
        c = self.c

        def fail(msg: str) -> None:
            raise InvariantError(msg)

        t1, t2, b1, b2 = self.t1_len, self.t2_len, self.b1_len, self.b2_len
        if min(t1, t2, b1, b2) < 0:
            fail("negative list length")
        if t1 + t2 > c:
            fail(f"|T1|+|T2|={t1 + t2} > c={c}")
        if b1 + b2 > c:
            fail(f"|B1|+|B2|={b1 + b2} > c={c}")
        if t1 + b1 > c:
            fail(f"|T1|+|B1|={t1 + b1} > c={c}")
        if t1 + t2 + b1 + b2 > 2 * c:
            fail("directory exceeds 2c")
        if not 0 <= self.p <= c:
            fail(f"p={self.p} outside [0, {c}]")
        for hand, n, label in (
            (self.hand_t1, t1, "T1"),
            (self.hand_t2, t2, "T2"),
            (self.hand_b1, b1, "B1"),
            (self.hand_b2, b2, "B2"),
        ):
            if not (0 <= hand < n or hand == 0):
                fail(f"hand of {label} at {hand} outside run of {n}")
        seen: dict[ChunkId, int] = {}
        for s in range(c):
            x = self.top_ids[s]
            if s < t1:
                want = T1
            elif s >= c - t2:
                want = T2
            else:
                want = None
            if want is None:
                if x is not None or self.top_bits[s]:
                    fail(f"top slot {s} should be free")
                continue
            if x is None:
                fail(f"hole in {want.name} at top slot {s}")
            if self.top_bits[s] not in (0, 1):
                fail(f"bad R-bit at top slot {s}")
            if x in seen:
                fail(f"chunk {x} appears twice")
            seen[x] = (s << 2) | want
        for s in range(c):
            x = self.bottom_ids[s]
            if s < b1:
                want = B1
            elif s >= c - b2:
                want = B2
            else:
                want = None
            if want is None:
                if x is not None:
                    fail(f"bottom slot {s} should be free")
                continue
            if x is None:
                fail(f"hole in {want.name} at bottom slot {s}")
            if x in seen:
                fail(f"chunk {x} appears twice")
            seen[x] = (s << 2) | want
        if seen != self._loc:
            fail("directory does not match buffers")

    def dump(self) -> str:
        """Line-per-slot text dump: ``buffer slot region chunk rbit hands``."""
        c = self.c
        out = [
            f"# c={c} p={self.p} t1={self.t1_len} t2={self.t2_len} "
            f"b1={self.b1_len} b2={self.b2_len}"
        ]
        hands_top = {self.hand_slot(T1): "H1", self.hand_slot(T2): "H2"}
        hands_bottom = {self.hand_slot(B1): "HB1", self.hand_slot(B2): "HB2"}
        for s in range(c):
            x = self.top_ids[s]
            region = "T1" if s < self.t1_len else "T2" if s >= c - self.t2_len else "-"
            chunk = "-" if x is None else str(x)
            bit = str(self.top_bits[s]) if x is not None else "-"
            marks = " ".join(v for k, v in hands_top.items() if k == s)
            out.append(f"top {s} {region} {chunk} {bit} {marks}".rstrip())
        for s in range(c):
            x = self.bottom_ids[s]
            region = "B1" if s < self.b1_len else "B2" if s >= c - self.b2_len else "-"
            chunk = "-" if x is None else str(x)
            marks = " ".join(v for k, v in hands_bottom.items() if k == s)
            out.append(f"bottom {s} {region} {chunk} - {marks}".rstrip())
        return "\n".join(out) + "\n"

    @classmethod
    def from_layout(
        cls,
        capacity: int,
        *,
        t1: Sequence[tuple[ChunkId, int]] = (),
        t2: Sequence[tuple[ChunkId, int]] = (),
        b1: Iterable[ChunkId] = (),
        b2: Iterable[ChunkId] = (),
        p: Optional[int] = None,
        hands: Optional[dict[str, int]] = None,
        **kwargs,
    ) -> "CompactCar":
        """Build a state directly; list arguments run outer end -> edge."""
        self = cls(capacity, **kwargs)
        c = capacity
        b1 = list(b1)
        b2 = list(b2)
        for j, (x, bit) in enumerate(t1):
            self.top_ids[j] = x
            self.top_bits[j] = bit
            self._loc[x] = (j << 2) | T1
        for j, (x, bit) in enumerate(t2):
            s = c - 1 - j
            self.top_ids[s] = x
            self.top_bits[s] = bit
            self._loc[x] = (s << 2) | T2
        for j, x in enumerate(b1):
            self.bottom_ids[j] = x
            self._loc[x] = (j << 2) | B1
        for j, x in enumerate(b2):
            s = c - 1 - j
            self.bottom_ids[s] = x
            self._loc[x] = (s << 2) | B2
        self.t1_len, self.t2_len = len(t1), len(t2)
        self.b1_len, self.b2_len = len(b1), len(b2)
        if p is not None:
            self.p = p
        for name, h in (hands or {}).items():
            setattr(self, f"hand_{name.lower()}", h)
        self.check_invariants()
        return self


class Cfr(CompactCar):
    """Compact CAR with the target size pinned to ``round(q * c)``."""

    name = "cfr"

    def __init__(self, capacity: int, q: float, *, debug: bool = False) -> None:
        super().__init__(capacity, debug=debug)
        self.q = q
        self.p = fixed_target(q, capacity)
        self.adaptive = False
