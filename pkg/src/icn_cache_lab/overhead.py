"""Closed-form control-memory and time costs of replacement policies.

Symbols: ``n`` cache entries, ``P`` pointer bits (at least ceil(log2 n)),
``C`` counter bits, ``m`` LIRS ghost entries. Time costs are symbolic: memory
reads ``t_r``, writes ``t_w`` and a small constant ``δ``, or a big-O class.
Ghost-list storage is not counted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

POLICIES = (
    "fifo",
    "lru_dll",
    "lru_s",
    "lru_c",
    "lfu_h",
    "arc",
    "lirs",
    "clock",
    "car",
    "compact-car",
)

_ALIASES = {"lru": "lru_dll", "lfu": "lfu_h", "compact_car": "compact-car", "ccar": "compact-car"}


def canonical_policy(name: str) -> str:
    key = name.lower()
    key = _ALIASES.get(key, key)
    if key not in POLICIES:
        raise ValueError(f"unknown policy {name!r}; expected one of {', '.join(POLICIES)}")
    return key


def min_pointer_bits(n: int) -> int:
    """ceil(log2 n)."""
    return (n - 1).bit_length()


def space_overhead(
    policy: str,
    n: int,
    P: Optional[int] = None,
    C: Optional[int] = None,
    m: Optional[int] = None,
) -> int:
    """Control-memory bits of ``policy`` for ``n`` entries."""
    key = canonical_policy(policy)
    if n < 1:
        raise ValueError("n must be positive")
    floor = min_pointer_bits(n)
    if P is None:
        P = floor
    if P < floor:
        raise ValueError(f"P={P} cannot address {n} entries (needs >= {floor})")

    def need(value: Optional[int], label: str) -> int:
        if value is None:
            raise ValueError(f"{key} needs {label}")
        if value < 0:
            raise ValueError(f"{label} must be >= 0")
        return value

    if key == "fifo":
        return P
    if key == "lru_dll":
        return 2 * n * P + 2 * P
    if key == "lru_s":
        return 0
    if key == "lru_c":
        C = need(C, "C")
        return n * C + C
    if key == "lfu_h":
        return n * need(C, "C")
    if key == "arc":
        return 4 * n * P + 7 * P
    if key == "lirs":
        m = need(m, "m")
        return 4 * n * P + 2 * n + 2 * m * P + 4 * P
    if key == "clock":
        return n + P
    if key == "car":
        return 4 * n * P + n + 9 * P
    return n + 9 * P


SPACE_ORDER = {
    "fifo": ("O(log n)", "-"),
    "lru_dll": ("O(n log n)", "-"),
    "lru_s": ("O(1)", "-"),
    "lru_c": ("O(n log n)", "-"),
    "lfu_h": ("O(n·C)", "-"),
    "arc": ("O(n log n)", "n"),
    "lirs": ("O(m + n log n)", "m"),
    "clock": ("O(n)", "-"),
    "car": ("O(n log n)", "n"),
    "compact-car": ("O(n)", "n"),
}


@dataclass(frozen=True)
class TimeCost:
    """Either an exact memory-access count or a big-O class."""

    reads: int = 0
    writes: int = 0
    delta: bool = False
    order: Optional[str] = None

    def __str__(self) -> str:
        if self.order is not None:
            return f"O({self.order})"
        terms = []
        if self.reads:
            terms.append("t_r" if self.reads == 1 else f"{self.reads}t_r")
        if self.writes:
            terms.append("t_w" if self.writes == 1 else f"{self.writes}t_w")
        if self.delta:
            terms.append("δ")
        return " + ".join(terms)


def _exact(reads: int = 0, writes: int = 0) -> TimeCost:
    return TimeCost(reads, writes, True)


def _o(order: str) -> TimeCost:
    return TimeCost(order=order)


# (worst hit, worst miss, average hit, average miss)
_TIME = {
    "fifo": (_exact(), _exact(1, 1), _exact(), _exact(1, 1)),
    "lru_dll": (_exact(3, 6),) * 4,
    "lru_s": (_o("n"),) * 4,
    "lru_c": (_o("1"), _o("n"), _o("1"), _o("n")),
    "lfu_h": (_o("log n"),) * 4,
    "arc": (_o("1"),) * 4,
    "lirs": (_o("m"), _o("m"), _o("1/β"), _o("1/β")),
    "clock": (_exact(0, 1), _o("n"), _exact(0, 1), _o("1/(1-β)")),
    "car": (_exact(0, 1), _o("n"), _exact(0, 1), _o("1/(1-β)")),
    "compact-car": (_exact(0, 1), _o("n"), _exact(0, 1), _o("1/(1-β)")),
}


def time_class(policy: str, outcome: str, case: str) -> TimeCost:
    """Time overhead for ``outcome`` in {hit, miss} and ``case`` in {worst, average}."""
    key = canonical_policy(policy)
    if outcome not in ("hit", "miss") or case not in ("worst", "average"):
        raise ValueError("outcome must be hit|miss and case worst|average")
    col = (0 if case == "worst" else 2) + (0 if outcome == "hit" else 1)
    return _TIME[key][col]


def overhead_rows(n: int, P: Optional[int] = None, C: Optional[int] = None, m: Optional[int] = None):
    """One dict per policy for tabular output; bits are None when a needed
    parameter is missing."""
    rows = []
    for key in POLICIES:
        try:
            bits: Optional[int] = space_overhead(key, n, P, C, m)
        except ValueError:
            bits = None
        order, history = SPACE_ORDER[key]
        rows.append(
            {
                "policy": key,
                "bits": bits,
                "order": order,
                "history": history,
                "hit_worst": str(time_class(key, "hit", "worst")),
                "miss_worst": str(time_class(key, "miss", "worst")),
                "hit_average": str(time_class(key, "hit", "average")),
                "miss_average": str(time_class(key, "miss", "average")),
            }
        )
    return rows
