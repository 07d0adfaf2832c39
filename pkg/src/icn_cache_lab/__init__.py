"""Chunk-cache replacement policies and a trace-driven simulator for ICN routers."""

from .compact_car import Cfr, CompactCar
from .kernel import AccessOutcome, Kind, Policy, Request
from .policies import POLICY_NAMES, make_policy

__version__ = "0.1.0"

__all__ = [
    "AccessOutcome",
    "Cfr",
    "CompactCar",
    "Kind",
    "POLICY_NAMES",
    "Policy",
    "Request",
    "make_policy",
]
