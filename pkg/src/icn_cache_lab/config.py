"""Declarative experiment files (JSON).

Example::

    {
      "workload": {"kind": "zipf", "contents": 10000, "alpha": 0.8,
                   "requests": 1000000, "seed": 1},
      "policies": ["fifo", "clock", "compact-car", {"name": "cfr", "q": 0.5}],
      "capacities": [10, 100, 1000],
      "topology": "single",
      "output": "results"
    }

``trace`` (a trace-file path, relative to the config file) may replace
``workload``. ``seeds`` overrides the workload seed and multiplies cells.
``window`` turns on dynamics logging for the policies that adapt q and is
ignored for the rest.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Optional

from .experiments import build_workload
from .policies import POLICY_NAMES
from .sim import PolicySpec, SimConfig, parse_topology
from .workload import RequestStream, load_trace

# policies that expose q; ``window`` only applies to these
ADAPTIVE_POLICIES = {"compact-car", "cfr"}

CONFIG_KEYS = {"workload", "trace", "policies", "capacities", "topology", "seeds", "window", "warmup", "output"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    policies: list[PolicySpec]
    capacities: list[int]
    workload: Optional[dict] = None
    trace: Optional[str] = None
    topologies: list[str] = field(default_factory=lambda: ["single"])
    seeds: Optional[list[int]] = None
    window: Optional[int] = None
    warmup: int = 0
    output: str = "results"

    def streams(self) -> list[tuple[Optional[int], RequestStream]]:
        """(seed, stream) per seed; seed is None for traces or a single spec."""
        if self.trace is not None:
            return [(None, load_trace(self.trace))]
        if self.seeds is None:
            return [(None, build_workload(self.workload))]
        return [(s, build_workload(dict(self.workload, seed=s))) for s in self.seeds]

    def cells(self) -> list[SimConfig]:
        return [
            SimConfig(p, c, t, self.window if p.name in ADAPTIVE_POLICIES else None, self.warmup)
            for p in self.policies
            for c in self.capacities
            for t in self.topologies
        ]


def _int_list(value: Any, key: str) -> list[int]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key} must be a non-empty list")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{key} entries must be integers, got {v!r}")
        out.append(v)
    return out


def parse_config(data: Any, base_dir: str = ".") -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if ("workload" in data) == ("trace" in data):
        raise ConfigError("give exactly one of 'workload' or 'trace'")
    for key in ("policies", "capacities"):
        if key not in data:
            raise ConfigError(f"missing required key {key!r}")

    if not isinstance(data["policies"], list) or not data["policies"]:
        raise ConfigError("policies must be a non-empty list")
    policies = []
    for p in data["policies"]:
        try:
            spec = PolicySpec.parse(p)
        except (TypeError, KeyError):
            raise ConfigError(f"bad policy entry {p!r}") from None
        if spec.name not in POLICY_NAMES:
            raise ConfigError(f"unknown policy {spec.name!r}")
        policies.append(spec)

    capacities = _int_list(data["capacities"], "capacities")
    if min(capacities) < 1:
        raise ConfigError("capacities must be >= 1")

    topo = data.get("topology", "single")
    topologies = topo if isinstance(topo, list) else [topo]
    for t in topologies:
        try:
            parse_topology(t)
        except (ValueError, AttributeError) as exc:
            raise ConfigError(str(exc)) from None

    seeds = _int_list(data["seeds"], "seeds") if "seeds" in data else None
    window = data.get("window")
    if window is not None and (not isinstance(window, int) or window < 1):
        raise ConfigError("window must be a positive integer")
    warmup = data.get("warmup", 0)
    if not isinstance(warmup, int) or warmup < 0:
        raise ConfigError("warmup must be a non-negative integer")

    workload = data.get("workload")
    trace = data.get("trace")
    if workload is not None:
        if not isinstance(workload, dict):
            raise ConfigError("workload must be an object")
        probe = dict(workload)
        if seeds is not None:
            probe["seed"] = seeds[0]
        # validate keys without generating the stream
        from .experiments import WORKLOAD_KEYS

        kind = probe.get("kind")
        if kind not in WORKLOAD_KEYS:
            raise ConfigError(f"unknown workload kind {kind!r}")
        extra = set(probe) - WORKLOAD_KEYS[kind]
        if extra:
            raise ConfigError(f"unknown keys for {kind} workload: {', '.join(sorted(extra))}")
    if trace is not None:
        if not isinstance(trace, str):
            raise ConfigError("trace must be a path")
        trace = os.path.join(base_dir, trace)

    output = data.get("output", "results")
    if not isinstance(output, str):
        raise ConfigError("output must be a path")
    return ExperimentConfig(
        policies, capacities, workload, trace, topologies, seeds, window, warmup,
        os.path.join(base_dir, output),
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data, os.path.dirname(os.path.abspath(path)))
