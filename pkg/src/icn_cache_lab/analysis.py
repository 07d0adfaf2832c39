"""Offline stream analytics: reuse distance, popularity, traffic statistics,
and average hand-movement bounds for CLOCK-family policies."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import IO, Sequence, Union

import numpy as np

from .kernel import ChunkId

StreamLike = Union[Sequence[ChunkId], np.ndarray]


def _as_list(stream) -> list[ChunkId]:
    if hasattr(stream, "ids"):
        return stream.ids()
    if isinstance(stream, np.ndarray):
        return stream.tolist()
    return list(stream)


# -- reuse distance ----------------------------------------------------------------


@dataclass
class ReuseDistanceProfile:
    """Per-request reuse distances (``inf`` for first accesses)."""

    distances: np.ndarray
    mode: str

    @property
    def finite(self) -> np.ndarray:
        d = self.distances
        return d[np.isfinite(d)]

    def cdf(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct finite distances and the cumulative fraction at each."""
        f = self.finite
        if f.size == 0:
            return np.empty(0), np.empty(0)
        values, counts = np.unique(f, return_counts=True)
        return values, np.cumsum(counts) / f.size


def reuse_distance(stream: StreamLike, mode: str = "distinct") -> ReuseDistanceProfile:
    """Reuse distance of every request.

    ``distinct`` counts distinct chunks between consecutive accesses (stack
    distance, via a Fenwick tree over last-access positions); ``raw`` counts
    intervening requests.
    """
    ids = _as_list(stream)
    n = len(ids)
    out = np.full(n, np.inf)
    last: dict[ChunkId, int] = {}
    if mode == "raw":
        for k, x in enumerate(ids):
            j = last.get(x)
            if j is not None:
                out[k] = k - j - 1
            last[x] = k
        return ReuseDistanceProfile(out, mode)
    if mode != "distinct":
        raise ValueError(f"unknown reuse-distance mode {mode!r}")
    # tree[i] marks position i-1 as the latest access of its chunk
    tree = [0] * (n + 1)
    marked = 0
    for k, x in enumerate(ids):
        j = last.get(x)
        if j is not None:
            # marks at positions <= j
            i = j + 1
            upto = 0
            while i > 0:
                upto += tree[i]
                i -= i & -i
            out[k] = marked - upto
            i = j + 1
            while i <= n:
                tree[i] -= 1
                i += i & -i
            marked -= 1
        i = k + 1
        while i <= n:
            tree[i] += 1
            i += i & -i
        marked += 1
        last[x] = k
    return ReuseDistanceProfile(out, mode)


# -- popularity --------------------------------------------------------------------


def popularity_histogram(stream: StreamLike) -> tuple[np.ndarray, np.ndarray]:
    """Chunk ids and their request counts, most requested first.

    Ties keep ascending chunk id order.
    """
    arr = np.asarray(_as_list(stream), dtype=np.int64)
    if arr.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    ids, counts = np.unique(arr, return_counts=True)
    order = np.argsort(-counts, kind="stable")
    return ids[order], counts[order]


def loglog_slope(counts: np.ndarray, max_rank: int | None = None) -> float:
    """Least-squares slope of log(frequency) against log(rank)."""
    counts = np.asarray(counts, dtype=np.float64)
    if max_rank is not None:
        counts = counts[:max_rank]
    counts = counts[counts > 0]
    if counts.size < 2:
        raise ValueError("need at least two non-zero ranks")
    ranks = np.arange(1, counts.size + 1, dtype=np.float64)
    slope, _ = np.polyfit(np.log(ranks), np.log(counts), 1)
    return float(slope)


# -- traffic statistics --------------------------------------------------------------


@dataclass
class TrafficCounts:
    """h_i = chunks accessed at least i times per tumbling window.

    ``beta = h2/h1`` and ``gamma = h3/h1`` per window; pooled values are the
    request-weighted means over full windows.
    """

    window: int
    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray

    @property
    def beta(self) -> np.ndarray:
        return self.h2 / self.h1

    @property
    def gamma(self) -> np.ndarray:
        return self.h3 / self.h1

    @property
    def pooled_beta(self) -> float:
        return float(self.beta.mean())

    @property
    def pooled_gamma(self) -> float:
        return float(self.gamma.mean())


def traffic_counts(stream: StreamLike, window: int) -> TrafficCounts:
    """Per-window h1, h2, h3 over full tumbling windows (a trailing partial
    window is ignored)."""
    if window <= 0:
        raise ValueError("window must be positive")
    arr = np.asarray(_as_list(stream), dtype=np.int64)
    if window > arr.size:
        raise ValueError(f"window {window} exceeds stream length {arr.size}")
    n_windows = arr.size // window
    arr = arr[: n_windows * window]
    win = np.repeat(np.arange(n_windows, dtype=np.int64), window)
    pairs = np.stack([win, arr], axis=1)
    uniq, counts = np.unique(pairs, axis=0, return_counts=True)
    w = uniq[:, 0]
    h1 = np.bincount(w, minlength=n_windows)
    h2 = np.bincount(w[counts >= 2], minlength=n_windows)
    h3 = np.bincount(w[counts >= 3], minlength=n_windows)
    return TrafficCounts(window, h1, h2, h3)


def hand_bound(beta: float, gamma: float) -> float:
    """Upper bound on average hand movements per miss for CAR-style double
    CLOCKs: (1 + beta + gamma) / (1 - beta)."""
    if beta >= 1:
        raise ValueError("bound undefined for beta >= 1")
    if not 0 <= gamma <= beta:
        raise ValueError("need 0 <= gamma <= beta")
    return (1 + beta + gamma) / (1 - beta)


def clock_hand_bound(beta: float) -> float:
    """Same bound for a single CLOCK: (1 + beta) / (1 - beta)."""
    if beta >= 1:
        raise ValueError("bound undefined for beta >= 1")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    return (1 + beta) / (1 - beta)


# -- CSV emission ----------------------------------------------------------------------


def _write_rows(dest, header: list[str], rows) -> None:
    """``dest`` is a path or an open text file."""
    if hasattr(dest, "write"):
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        _write_rows(fh, header, rows)


def write_cdf_csv(profile: ReuseDistanceProfile, dest: Union[str, os.PathLike, IO[str]]) -> None:
    x, frac = profile.cdf()
    rows = ([int(a), repr(b)] for a, b in zip(x.tolist(), frac.tolist()))
    _write_rows(dest, ["reuse_distance", "cumulative_fraction"], rows)


def write_popularity_csv(ids: np.ndarray, counts: np.ndarray, dest: Union[str, os.PathLike, IO[str]]) -> None:
    rows = ([r, x, n] for r, (x, n) in enumerate(zip(ids.tolist(), counts.tolist()), 1))
    _write_rows(dest, ["rank", "chunk_id", "count"], rows)


def rd_hit_fraction(profile: ReuseDistanceProfile, capacity: int) -> float:
    """Fraction of requests whose distance is below ``capacity`` (LRU hit rate
    in distinct mode)."""
    d = profile.distances
    if d.size == 0:
        return math.nan
    return float(np.count_nonzero(d < capacity) / d.size)
