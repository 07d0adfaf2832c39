"""Request stream synthesis and trace I/O.

Randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence``; per-session generators are spawned from the parent seed so
streams are reproducible bit-for-bit on any platform.

Chunk ids produced by :func:`chunkify` pack ``(content_id, chunk_index)`` as
``content_id << CHUNK_BITS | chunk_index``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .kernel import ChunkId, Request

CHUNK_BITS = 24
KB = 1000
KBPS = 1000


class TraceFormatError(ValueError):
    def __init__(self, path: str, line: int, msg: str) -> None:
        super().__init__(f"{path}:{line}: {msg}")
        self.path = path
        self.line = line


@dataclass
class RequestStream:
    """Ordered requests. ``times`` are request indices unless noted otherwise
    (chunk-level streams before re-indexing carry virtual seconds)."""

    chunks: np.ndarray
    times: Optional[np.ndarray] = None
    sizes: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.chunks = np.asarray(self.chunks, dtype=np.int64)
        if self.times is None:
            self.times = np.arange(len(self.chunks), dtype=np.int64)
        else:
            self.times = np.asarray(self.times)
        if self.sizes is not None:
            self.sizes = np.asarray(self.sizes, dtype=np.int64)
        if len(self.times) != len(self.chunks):
            raise ValueError("times and chunks differ in length")

    def __len__(self) -> int:
        return len(self.chunks)

    def __iter__(self) -> Iterator[Request]:
        for k, x in enumerate(self.chunks.tolist()):
            yield Request(x, k)

    def ids(self) -> list[ChunkId]:
        return self.chunks.tolist()

    def reindexed(self) -> "RequestStream":
        return RequestStream(self.chunks, None, self.sizes)

    def __add__(self, other: "RequestStream") -> "RequestStream":
        """Concatenate and re-index (phases of a synthetic stream)."""
        sizes = None
        if self.sizes is not None and other.sizes is not None:
            sizes = np.concatenate([self.sizes, other.sizes])
        return RequestStream(np.concatenate([self.chunks, other.chunks]), None, sizes)


def make_rng(seed: Union[int, np.random.SeedSequence]) -> np.random.Generator:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(ss))


# -- Zipf ---------------------------------------------------------------------


@dataclass(frozen=True)
class ZipfSpec:
    n_contents: int
    alpha: float
    n_requests: int
    seed: int
    interarrival: float = 1.0
    arrivals: str = "constant"  # or "poisson"

    def validate(self) -> None:
        if self.n_contents <= 0:
            raise ValueError("n_contents must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.n_requests < 0:
            raise ValueError("n_requests must be >= 0")
        if self.arrivals not in ("constant", "poisson"):
            raise ValueError(f"unknown arrival process {self.arrivals!r}")


def zipf_pmf(n_contents: int, alpha: float) -> np.ndarray:
    """p(i) proportional to i**-alpha for ranks i = 1..n_contents."""
    if n_contents <= 0:
        raise ValueError("n_contents must be positive")
    w = np.arange(1, n_contents + 1, dtype=np.float64) ** -alpha
    return w / w.sum()


def zipf_stream(spec: ZipfSpec) -> RequestStream:
    """I.i.d. Zipf draws; content ids are the ranks 1..n_contents.

    Arrival times are in virtual seconds (constant or Poisson spacing).
    """
    spec.validate()
    rng = make_rng(spec.seed)
    cdf = np.cumsum(zipf_pmf(spec.n_contents, spec.alpha))
    cdf[-1] = 1.0
    u = rng.random(spec.n_requests)
    ids = np.searchsorted(cdf, u, side="right") + 1
    np.minimum(ids, spec.n_contents, out=ids)
    if spec.arrivals == "constant":
        times = np.arange(spec.n_requests, dtype=np.float64) * spec.interarrival
    else:
        times = np.cumsum(rng.exponential(spec.interarrival, spec.n_requests))
    return RequestStream(ids, times)


# -- chunk-level streams --------------------------------------------------------


@dataclass(frozen=True)
class ChunkifySpec:
    chunk_size: int = 15 * KB
    bitrate: float = 600 * KBPS
    content_size: int = 600 * KB

    @property
    def chunks_per_second(self) -> float:
        return chunks_per_second(self.bitrate, self.chunk_size)


def chunks_per_second(bitrate: float, chunk_size: int) -> float:
    """Chunk rate of a stream at ``bitrate`` bit/s split into ``chunk_size``-byte chunks."""
    if chunk_size <= 0:
        raise ValueError("chunk size must be positive")
    return bitrate / (8 * chunk_size)


def chunk_id(content_id: int, index: int) -> ChunkId:
    return (content_id << CHUNK_BITS) | index


def split_chunk_id(chunk: ChunkId) -> tuple[int, int]:
    return chunk >> CHUNK_BITS, chunk & ((1 << CHUNK_BITS) - 1)


def chunk_counts(sizes: np.ndarray, chunk_size: int) -> np.ndarray:
    if chunk_size <= 0:
        raise ValueError("chunk size must be positive")
    return -(-np.asarray(sizes, dtype=np.int64) // chunk_size)


def chunkify_sessions(content: RequestStream, spec: ChunkifySpec) -> list[RequestStream]:
    """One chunk stream per content request, paced at spec.chunks_per_second."""
    if spec.chunk_size <= 0:
        raise ValueError("chunk size must be positive")
    rate = spec.chunks_per_second
    sizes = content.sizes if content.sizes is not None else np.full(len(content), spec.content_size)
    counts = chunk_counts(sizes, spec.chunk_size)
    out = []
    for cid, start, n in zip(content.chunks.tolist(), content.times.tolist(), counts.tolist()):
        idx = np.arange(n, dtype=np.int64)
        out.append(RequestStream((cid << CHUNK_BITS) | idx, start + idx / rate))
    return out


def chunkify(content: RequestStream, spec: ChunkifySpec) -> RequestStream:
    """Expand content requests into chunk requests and merge them by time.

    Output times stay in virtual seconds; ties go to the earlier content
    request, then to the lower chunk index.
    """
    if spec.chunk_size <= 0:
        raise ValueError("chunk size must be positive")
    sizes = content.sizes if content.sizes is not None else np.full(len(content), spec.content_size)
    counts = chunk_counts(sizes, spec.chunk_size)
    if np.any(counts >= (1 << CHUNK_BITS)):
        raise ValueError("content has too many chunks for the chunk id encoding")
    total = int(counts.sum())
    session = np.repeat(np.arange(len(content), dtype=np.int64), counts)
    offsets = np.repeat(np.cumsum(counts) - counts, counts)
    index = np.arange(total, dtype=np.int64) - offsets
    starts = np.asarray(content.times, dtype=np.float64)[session]
    times = starts + index / spec.chunks_per_second
    ids = (content.chunks[session] << CHUNK_BITS) | index
    order = np.lexsort((index, session, times))
    return RequestStream(ids[order], times[order])


def superimpose(streams: Sequence[RequestStream]) -> RequestStream:
    """Merge streams by time (ties: stream index, then sequence) and re-index."""
    if not streams:
        return RequestStream(np.empty(0, dtype=np.int64))
    chunks = np.concatenate([s.chunks for s in streams])
    times = np.concatenate([np.asarray(s.times, dtype=np.float64) for s in streams])
    source = np.concatenate([np.full(len(s), i, dtype=np.int64) for i, s in enumerate(streams)])
    seq = np.concatenate([np.arange(len(s), dtype=np.int64) for s in streams])
    order = np.lexsort((seq, source, times))
    return RequestStream(chunks[order])


# -- access patterns --------------------------------------------------------------


@dataclass(frozen=True)
class PatternSpec:
    """Canonical access patterns.

    scan:        ``length`` distinct chunks once each.
    loop:        a scan of ``period`` chunks repeated ``reps`` times.
    correlated:  ``bursts`` bursts of ``burst_length`` requests, each cycling
                 over its own fresh set of ``set_size`` chunks.
    fickle:      ``phases`` phases of ``phase_length`` uniform draws from a
                 working set of ``alphabet`` chunks; between phases a
                 ``rotation`` fraction of the set is replaced by new chunks.
    """

    kind: str
    length: int = 0
    period: int = 0
    reps: int = 1
    set_size: int = 0
    burst_length: int = 0
    bursts: int = 1
    phases: int = 1
    phase_length: int = 0
    alphabet: int = 0
    rotation: float = 0.5
    base: int = 1
    seed: int = 0


def pattern_stream(spec: PatternSpec) -> RequestStream:
    kind = spec.kind.lower()
    b = spec.base
    if kind == "scan":
        ids = np.arange(b, b + spec.length)
    elif kind == "loop":
        ids = np.tile(np.arange(b, b + spec.period), spec.reps)
    elif kind == "correlated":
        parts = []
        for k in range(spec.bursts):
            start = b + k * spec.set_size
            parts.append(start + np.arange(spec.burst_length) % spec.set_size)
        ids = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    elif kind == "fickle":
        rng = make_rng(spec.seed)
        working = np.arange(b, b + spec.alphabet)
        fresh = b + spec.alphabet
        parts = []
        for _ in range(spec.phases):
            parts.append(working[rng.integers(0, len(working), spec.phase_length)])
            k = int(round(spec.rotation * len(working)))
            if k:
                replace = rng.choice(len(working), size=k, replace=False)
                working = working.copy()
                working[replace] = np.arange(fresh, fresh + k)
                fresh += k
        ids = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    else:
        raise ValueError(f"unknown pattern kind {spec.kind!r}")
    return RequestStream(ids)


# -- trace-shaped synthetic stream ------------------------------------------------------

# (total accesses, unique chunks, chunks requested at least twice) per chunk size
TRACE_PROFILES = {
    "1.5KB": (17_955_409, 5_465_044, 440_254),
    "15KB": (14_557_548, 5_321_617, 552_631),
    "60KB": (16_606_810, 8_006_084, 1_769_759),
}


def profile_stream(
    total: int,
    unique: int,
    repeated: int,
    *,
    alpha: float = 1.0,
    seed: int = 0,
) -> RequestStream:
    """Random stream with exactly the given total / unique / repeated counts.

    ``unique - repeated`` chunks appear once; the remaining accesses go to the
    ``repeated`` chunks (each at least twice) with Zipf(alpha) weights.
    """
    if not 0 <= repeated <= unique <= total:
        raise ValueError("need repeated <= unique <= total")
    extra = total - unique - repeated
    if repeated == 0 and extra > 0 or extra < 0:
        raise ValueError("counts are inconsistent")
    rng = make_rng(seed)
    counts = np.ones(unique, dtype=np.int64)
    counts[:repeated] += 1
    if extra:
        counts[:repeated] += rng.multinomial(extra, zipf_pmf(repeated, alpha))
    ids = np.repeat(np.arange(1, unique + 1, dtype=np.int64), counts)
    rng.shuffle(ids)
    return RequestStream(ids)


def trace_profile_stream(row: str, scale: float = 1e-3, *, seed: int = 0) -> RequestStream:
    total, unique, repeated = TRACE_PROFILES[row]
    return profile_stream(
        max(1, round(total * scale)),
        max(1, round(unique * scale)),
        round(repeated * scale),
        seed=seed,
    )


# -- trace files ------------------------------------------------------------------------

TRACE_HEADER = "# time,content_id,size_bytes\n"


def _format_time(t) -> str:
    if isinstance(t, float):
        return repr(t)
    return str(t)


def save_trace(stream: RequestStream, path: Union[str, os.PathLike]) -> None:
    """Write ``time,content_id[,size_bytes]`` lines (UTF-8, LF)."""
    times = stream.times.tolist()
    ids = stream.chunks.tolist()
    sizes = stream.sizes.tolist() if stream.sizes is not None else None
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRACE_HEADER)
        if sizes is None:
            fh.writelines(f"{_format_time(t)},{x}\n" for t, x in zip(times, ids))
        else:
            fh.writelines(f"{_format_time(t)},{x},{s}\n" for t, x, s in zip(times, ids, sizes))


def _parse_time(text: str) -> Union[int, float]:
    if any(ch in text for ch in ".eEn"):
        return float(text)
    return int(text)


def load_trace(path: Union[str, os.PathLike]) -> RequestStream:
    path = os.fspath(path)
    times: list = []
    ids: list[int] = []
    sizes: list[int] = []
    with_size: Optional[bool] = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split(",")
            if len(fields) not in (2, 3):
                raise TraceFormatError(path, lineno, f"expected 2 or 3 fields, got {len(fields)}")
            has_size = len(fields) == 3
            if with_size is None:
                with_size = has_size
            elif has_size != with_size:
                raise TraceFormatError(path, lineno, "inconsistent field count")
            try:
                t = _parse_time(fields[0])
                x = int(fields[1])
                if has_size:
                    sizes.append(int(fields[2]))
            except ValueError as exc:
                raise TraceFormatError(path, lineno, str(exc)) from None
            if isinstance(t, float) and not math.isfinite(t):
                raise TraceFormatError(path, lineno, "time must be finite")
            if times and t < times[-1]:
                raise TraceFormatError(path, lineno, f"time {t} goes backwards")
            times.append(t)
            ids.append(x)
    if any(isinstance(t, float) for t in times):
        time_arr = np.asarray(times, dtype=np.float64)
    else:
        time_arr = np.asarray(times, dtype=np.int64)
    return RequestStream(
        np.asarray(ids, dtype=np.int64),
        time_arr,
        np.asarray(sizes, dtype=np.int64) if with_size else None,
    )
