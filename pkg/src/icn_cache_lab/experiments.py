"""Workload builders shared by the CLI, config files and the test suite."""

from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from .workload import (
    KB,
    KBPS,
    TRACE_PROFILES,
    ChunkifySpec,
    PatternSpec,
    RequestStream,
    ZipfSpec,
    chunkify,
    make_rng,
    pattern_stream,
    trace_profile_stream,
    zipf_stream,
)

WORKLOAD_KEYS = {
    "zipf": {"kind", "contents", "alpha", "requests", "seed", "interarrival", "arrivals"},
    "chunked": {
        "kind", "contents", "alpha", "requests", "seed", "interarrival", "arrivals",
        "chunk_kb", "bitrate_kbps", "content_kb",
    },
    "pattern": {
        "kind", "pattern", "length", "period", "reps", "set_size", "burst_length", "bursts",
        "phases", "phase_length", "alphabet", "rotation", "base", "seed",
    },
    "profile": {"kind", "row", "scale", "seed"},
    "two-phase": {"kind", "capacity", "seed"},
}


def chunked_stream(
    contents: int,
    alpha: float,
    requests: int,
    seed: int,
    *,
    chunk_kb: float = 15,
    bitrate_kbps: float = 600,
    content_kb: float = 600,
    interarrival: float = 1.0,
    arrivals: str = "poisson",
) -> RequestStream:
    """Zipf content requests expanded to paced chunk requests, merged by time
    and re-indexed to request counts."""
    content = zipf_stream(ZipfSpec(contents, alpha, requests, seed, interarrival, arrivals))
    spec = ChunkifySpec(int(round(chunk_kb * KB)), bitrate_kbps * KBPS, int(round(content_kb * KB)))
    return chunkify(content, spec).reindexed()


def two_phase_stream(capacity: int, seed: int = 0, rounds: int = 40) -> tuple[RequestStream, int]:
    """Recency-favouring phase followed by a frequency-favouring phase.

    Returns the stream and the index where phase 2 starts.

    Phase 1 warms a small set into the frequency list, then feeds blocks of
    fresh chunks that are each replayed once at a gap of 0.75c: too long for
    a half-size recency list, short enough to be caught by its history.
    Phase 2 mixes a hot set of 0.6c chunks half and half with one-time
    chunks, so the frequency side is the one worth protecting.
    """
    rng = make_rng(seed)
    c = capacity
    warm = max(1, c // 2)
    gap = max(1, (3 * c) // 4)
    ids = list(range(1, warm + 1)) * 3
    nxt = warm + 1
    for _ in range(rounds):
        block = list(range(nxt, nxt + gap))
        nxt += gap
        ids.extend(block)
        ids.extend(block)
    split = len(ids)
    hot = np.arange(nxt, nxt + max(1, (3 * c) // 5))
    nxt += len(hot)
    pick = rng.random(split) < 0.5
    which = rng.integers(0, len(hot), split)
    for k in range(split):
        if pick[k]:
            ids.append(int(hot[which[k]]))
        else:
            ids.append(nxt)
            nxt += 1
    return RequestStream(np.asarray(ids, dtype=np.int64)), split


def build_workload(spec: Mapping[str, Any]) -> RequestStream:
    """Build a stream from a declarative mapping (``kind`` selects the generator)."""
    kind = spec.get("kind")
    if kind not in WORKLOAD_KEYS:
        raise ValueError(f"unknown workload kind {kind!r}; expected one of {', '.join(WORKLOAD_KEYS)}")
    extra = set(spec) - WORKLOAD_KEYS[kind]
    if extra:
        raise ValueError(f"unknown keys for {kind} workload: {', '.join(sorted(extra))}")

    def need(key: str):
        if key not in spec:
            raise ValueError(f"{kind} workload needs {key!r}")
        return spec[key]

    if kind == "zipf":
        return zipf_stream(
            ZipfSpec(
                int(need("contents")),
                float(need("alpha")),
                int(need("requests")),
                int(need("seed")),
                float(spec.get("interarrival", 1.0)),
                spec.get("arrivals", "constant"),
            )
        )
    if kind == "chunked":
        return chunked_stream(
            int(need("contents")),
            float(need("alpha")),
            int(need("requests")),
            int(need("seed")),
            chunk_kb=float(spec.get("chunk_kb", 15)),
            bitrate_kbps=float(spec.get("bitrate_kbps", 600)),
            content_kb=float(spec.get("content_kb", 600)),
            interarrival=float(spec.get("interarrival", 1.0)),
            arrivals=spec.get("arrivals", "poisson"),
        )
    if kind == "pattern":
        params = {k: v for k, v in spec.items() if k not in ("kind", "pattern")}
        return pattern_stream(PatternSpec(need("pattern"), **params))
    if kind == "profile":
        row = need("row")
        if row not in TRACE_PROFILES:
            raise ValueError(f"unknown profile row {row!r}; expected one of {', '.join(TRACE_PROFILES)}")
        return trace_profile_stream(row, float(spec.get("scale", 1e-3)), seed=int(need("seed")))
    return two_phase_stream(int(need("capacity")), int(need("seed")))[0]
