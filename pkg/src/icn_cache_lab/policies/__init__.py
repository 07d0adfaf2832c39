"""Replacement policies and a name-based factory."""

from __future__ import annotations

from typing import Any, Optional, Sequence

from ..compact_car import Cfr, CompactCar
from ..kernel import ChunkId, Policy
from .adaptive import Arc, Car
from .lirs import Lirs
from .opt import Opt, next_use_positions
from .simple import Clock, Fifo, Lfu, Lru

__all__ = [
    "Arc",
    "Car",
    "Cfr",
    "Clock",
    "CompactCar",
    "Fifo",
    "Lfu",
    "Lirs",
    "Lru",
    "Opt",
    "POLICY_NAMES",
    "make_policy",
    "next_use_positions",
]

_SIMPLE = {
    "fifo": Fifo,
    "clock": Clock,
    "lru": Lru,
    "lfu": Lfu,
    "arc": Arc,
    "car": Car,
    "lirs": Lirs,
    "compact-car": CompactCar,
}

POLICY_NAMES = tuple(sorted([*_SIMPLE, "cfr", "opt", "opt-nobypass"]))


def make_policy(
    name: str,
    capacity: int,
    stream: Optional[Sequence[ChunkId]] = None,
    **params: Any,
) -> Policy:
    """Build a policy by name.

    ``stream`` is required for ``opt``/``opt-nobypass``; ``cfr`` needs ``q``.
    """
    if name in ("opt", "opt-nobypass"):
        if stream is None:
            raise ValueError("OPT needs the request stream it will replay")
        return Opt(capacity, stream, bypass=name == "opt", **params)
    if name == "cfr":
        if "q" not in params:
            raise ValueError("cfr needs parameter q")
        return Cfr(capacity, **params)
    try:
        cls = _SIMPLE[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; expected one of {', '.join(POLICY_NAMES)}") from None
    return cls(capacity, **params)
