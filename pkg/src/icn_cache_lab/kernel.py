"""Shared vocabulary for every replacement policy.

A chunk is identified by a plain ``int`` (64-bit capable). Policies consume
chunk ids one at a time through :meth:`Policy.access` and report an
:class:`AccessOutcome` per request.
"""

from __future__ import annotations

import abc
import enum
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

ChunkId = int


class Kind(enum.IntEnum):
    HIT = 0
    MISS = 1
    GHOST_HIT = 2


class AccessOutcome(NamedTuple):
    """Result of one access.

    ``GHOST_HIT`` is a miss whose chunk was found in a history list; it counts
    as a miss for every hit-rate computation. ``hand_movements`` is the number
    of CLOCK hand rotations over resident entries during this access (zero for
    policies without a hand).
    """

    kind: Kind
    evicted: Optional[ChunkId] = None
    hand_movements: int = 0

    @property
    def is_hit(self) -> bool:
        return self.kind is Kind.HIT


HIT = AccessOutcome(Kind.HIT)
MISS = AccessOutcome(Kind.MISS)


@dataclass(frozen=True)
class Request:
    chunk: ChunkId
    virtual_time: int


class Region(enum.IntEnum):
    T1 = 0
    T2 = 1
    B1 = 2
    B2 = 3


class DirectoryIndex:
    """Chunk id -> (region, slot) map used by array-based policies.

    Locations are packed into one int (``slot << 2 | region``) so that the hot
    path stays a single dict operation.
    """

    __slots__ = ("_loc",)

    def __init__(self) -> None:
        self._loc: dict[ChunkId, int] = {}

    @staticmethod
    def pack(region: int, slot: int) -> int:
        return (slot << 2) | region

    def set(self, chunk: ChunkId, region: int, slot: int) -> None:
        self._loc[chunk] = (slot << 2) | region

    def remove(self, chunk: ChunkId) -> None:
        del self._loc[chunk]

    def lookup(self, chunk: ChunkId) -> Optional[tuple[Region, int]]:
        loc = self._loc.get(chunk)
        if loc is None:
            return None
        return Region(loc & 3), loc >> 2

    def raw(self) -> dict[ChunkId, int]:
        return self._loc

    def items(self) -> Iterator[tuple[ChunkId, tuple[Region, int]]]:
        for chunk, loc in self._loc.items():
            yield chunk, (Region(loc & 3), loc >> 2)

    def __contains__(self, chunk: ChunkId) -> bool:
        return chunk in self._loc

    def __len__(self) -> int:
        return len(self._loc)


def directory_lookup(index: DirectoryIndex, chunk: ChunkId) -> Optional[tuple[Region, int]]:
    return index.lookup(chunk)


class Policy(abc.ABC):
    """Contract implemented by every replacement policy.

    At most one chunk is evicted per access and the resident set never
    exceeds ``capacity``. Instances are single-threaded.
    """

    name: str = "policy"

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity

    @abc.abstractmethod
    def access(self, chunk: ChunkId) -> AccessOutcome:
        """Process one request for ``chunk``."""

    @abc.abstractmethod
    def __contains__(self, chunk: ChunkId) -> bool:
        """True if ``chunk`` is resident (ghost entries are not resident)."""

    @abc.abstractmethod
    def resident(self) -> set[ChunkId]:
        """Snapshot of resident chunk ids."""

    def __len__(self) -> int:
        return len(self.resident())

    def __repr__(self) -> str:
        return f"{type(self).__name__}(capacity={self.capacity})"


def policy_access(policy: Policy, request: Request) -> AccessOutcome:
    return policy.access(request.chunk)
