"""Trace-driven simulation: single node, line topology and capacity sweeps.

Requests are processed one at a time end to end, so the line topology can be
run node by node: node ``j`` sees exactly the misses of node ``j-1`` in order,
and every node that misses caches the returned chunk.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Sequence

from .kernel import ChunkId, Policy
from .policies import make_policy

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PolicySpec:
    name: str
    params: tuple[tuple[str, Any], ...] = ()

    @classmethod
    def parse(cls, value: Any) -> "PolicySpec":
        """Accept ``"lru"``, ``{"name": "cfr", "q": 0.5}`` or a PolicySpec."""
        if isinstance(value, PolicySpec):
            return value
        if isinstance(value, str):
            return cls(value)
        if isinstance(value, dict):
            params = {k: v for k, v in value.items() if k != "name"}
            return cls(value["name"], tuple(sorted(params.items())))
        raise TypeError(f"cannot interpret policy {value!r}")

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.name}({inner})"

    def build(self, capacity: int, stream: Optional[Sequence[ChunkId]] = None) -> Policy:
        return make_policy(self.name, capacity, stream=stream, **dict(self.params))


@dataclass(frozen=True)
class SimConfig:
    policy: PolicySpec
    capacity: int
    topology: str = "single"
    window: Optional[int] = None
    warmup: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "policy", PolicySpec.parse(self.policy))
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        parse_topology(self.topology)
        if self.window is not None and self.window < 1:
            raise ValueError("window must be >= 1")
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")


def parse_topology(topology: str) -> tuple[str, int]:
    """``single`` -> ("single", 1); ``line:10`` -> ("line", 10); ``ideal-coop:10``."""
    if topology == "single":
        return "single", 1
    kind, sep, k = topology.partition(":")
    if kind in ("line", "ideal-coop") and sep:
        try:
            n = int(k)
        except ValueError:
            n = 0
        if n >= 1:
            return kind, n
    raise ValueError(f"bad topology {topology!r}; use single, line:K or ideal-coop:K")


@dataclass
class NodeStats:
    """Counts at one cache. ``misses`` includes ``ghost_hits``."""

    requests: int = 0
    hits: int = 0
    misses: int = 0
    ghost_hits: int = 0
    hand_movements: int = 0

    @property
    def hit_rate(self) -> float:
        return self.hits / self.requests if self.requests else 0.0

    @property
    def moves_per_miss(self) -> float:
        return self.hand_movements / self.misses if self.misses else 0.0


@dataclass
class DynamicsSample:
    t: int
    q: float
    hit_rate: float


@dataclass
class SimulationReport:
    policy: str
    capacity: int
    topology: str
    nodes: list[NodeStats]
    client_requests: int
    server_requests: int
    dynamics: list[DynamicsSample] = field(default_factory=list)

    @property
    def hit_rate(self) -> float:
        return self.nodes[0].hit_rate

    @property
    def first_node_rate(self) -> float:
        return self.nodes[0].hit_rate

    @property
    def non_coop_total(self) -> float:
        """Fraction of client requests served by some cache."""
        if not self.client_requests:
            return 0.0
        return (self.client_requests - self.server_requests) / self.client_requests

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "policy": self.policy,
            "capacity": self.capacity,
            "topology": self.topology,
            "client_requests": self.client_requests,
            "server_requests": self.server_requests,
            "non_coop_total": self.non_coop_total,
            "first_node_rate": self.first_node_rate,
            "nodes": [dict(asdict(n), node=i + 1, hit_rate=n.hit_rate) for i, n in enumerate(self.nodes)],
            "dynamics": [asdict(s) for s in self.dynamics],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def nodes_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "requests", "hits", "misses", "ghost_hits", "hit_rate", "hand_movements"])
        for i, n in enumerate(self.nodes, 1):
            w.writerow([i, n.requests, n.hits, n.misses, n.ghost_hits, repr(n.hit_rate), n.hand_movements])
        return buf.getvalue()

    def dynamics_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "q", "hit_rate"])
        for s in self.dynamics:
            w.writerow([s.t, repr(s.q), repr(s.hit_rate)])
        return buf.getvalue()


def replay(
    policy: Policy,
    ids: Sequence[ChunkId],
    *,
    window: Optional[int] = None,
    warmup: int = 0,
    collect_misses: bool = False,
) -> tuple[NodeStats, list[DynamicsSample], list[ChunkId]]:
    """Drive ``policy`` over ``ids``; counts start after ``warmup`` requests."""
    if window is not None and not hasattr(policy, "target_q"):
        raise ValueError(f"policy {policy.name} has no adaptive target q to log")
    access = policy.access
    stats = NodeStats()
    samples: list[DynamicsSample] = []
    misses: list[ChunkId] = []
    if warmup:
        for x in ids[:warmup]:
            if access(x)[0] and collect_misses:
                misses.append(x)
        ids = ids[warmup:]
    hits = ghosts = moves = 0
    if window is None:
        if collect_misses:
            add = misses.append
            for x in ids:
                o = access(x)
                k = o[0]
                if k:
                    add(x)
                    moves += o[2]
                    if k == 2:
                        ghosts += 1
                else:
                    hits += 1
        else:
            for x in ids:
                o = access(x)
                k = o[0]
                if k:
                    moves += o[2]
                    if k == 2:
                        ghosts += 1
                else:
                    hits += 1
    else:
        win_hits = 0
        n = 0
        for x in ids:
            o = access(x)
            k = o[0]
            if k:
                if collect_misses:
                    misses.append(x)
                moves += o[2]
                if k == 2:
                    ghosts += 1
            else:
                hits += 1
                win_hits += 1
            n += 1
            if n % window == 0:
                samples.append(DynamicsSample(warmup + n, policy.target_q(), win_hits / window))
                win_hits = 0
    total = len(ids)
    stats.requests = total
    stats.hits = hits
    stats.misses = total - hits
    stats.ghost_hits = ghosts
    stats.hand_movements = moves
    return stats, samples, misses


def _ids(stream) -> list[ChunkId]:
    if hasattr(stream, "ids"):
        return stream.ids()
    return list(stream)


def run_single(stream, config: SimConfig) -> SimulationReport:
    ids = _ids(stream)
    policy = config.policy.build(config.capacity, ids)
    stats, samples, _ = replay(policy, ids, window=config.window, warmup=config.warmup)
    return SimulationReport(
        config.policy.label,
        config.capacity,
        "single",
        [stats],
        stats.requests,
        stats.misses,
        samples,
    )


def run_line(stream, config: SimConfig, k: Optional[int] = None) -> SimulationReport:
    """``k`` caches in a row with on-path cache-everything.

    Per-node hit rates use the requests reaching that node as denominator.
    """
    if k is None:
        kind, k = parse_topology(config.topology)
        if kind != "line":
            raise ValueError("run_line needs a line:K topology")
    if k < 1:
        raise ValueError("k must be >= 1")
    current = _ids(stream)
    nodes = []
    for j in range(k):
        policy = config.policy.build(config.capacity, current)
        stats, _, misses = replay(policy, current, collect_misses=True)
        nodes.append(stats)
        current = misses
    return SimulationReport(
        config.policy.label,
        config.capacity,
        f"line:{k}",
        nodes,
        nodes[0].requests,
        len(current),
    )


def run_ideal_coop(stream, config: SimConfig, k: int) -> SimulationReport:
    """One node holding the aggregate capacity of ``k`` line nodes."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cfg = SimConfig(config.policy, config.capacity * k, "single", config.window, config.warmup)
    report = run_single(stream, cfg)
    report.capacity = config.capacity
    report.topology = f"ideal-coop:{k}"
    return report


def run(stream, config: SimConfig) -> SimulationReport:
    kind, k = parse_topology(config.topology)
    if kind == "line":
        return run_line(stream, config, k)
    if kind == "ideal-coop":
        return run_ideal_coop(stream, config, k)
    return run_single(stream, config)


def _run_cell(args) -> SimulationReport:
    ids, config = args
    return run(ids, config)


def run_many(stream, configs: Sequence[SimConfig], jobs: int = 1) -> list[SimulationReport]:
    """Independent runs, results in input order."""
    ids = _ids(stream)
    if jobs <= 1 or len(configs) <= 1:
        return [run(ids, cfg) for cfg in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_cell, [(ids, cfg) for cfg in configs]))


def sweep_capacities(stream, config: SimConfig, capacities: Sequence[int], jobs: int = 1) -> list[SimulationReport]:
    configs = [SimConfig(config.policy, c, config.topology, config.window, config.warmup) for c in capacities]
    return run_many(stream, configs, jobs)


def log_dynamics(stream, config: SimConfig) -> list[DynamicsSample]:
    """Tumbling-window (t, q, windowed hit rate) samples; window defaults to 10^4."""
    window = config.window or 10_000
    cfg = SimConfig(config.policy, config.capacity, "single", window, config.warmup)
    return run_single(stream, cfg).dynamics


def summary_csv(reports: Sequence[SimulationReport]) -> str:
    """One row per cell; node columns sized to the widest topology."""
    width = max((len(r.nodes) for r in reports), default=1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["policy", "capacity", "topology", "requests", "hits", "ghost_hits", "hit_rate",
         "non_coop_total", "first_node_rate", "hand_movements"]
        + [f"node{i}" for i in range(1, width + 1)]
    )
    for r in reports:
        nodes = [repr(n.hit_rate) for n in r.nodes] + [""] * (width - len(r.nodes))
        w.writerow(
            [r.policy, r.capacity, r.topology, r.client_requests, sum(n.hits for n in r.nodes),
             sum(n.ghost_hits for n in r.nodes), repr(r.nodes[0].hit_rate), repr(r.non_coop_total),
             repr(r.first_node_rate), sum(n.hand_movements for n in r.nodes)]
            + nodes
        )
    return buf.getvalue()
