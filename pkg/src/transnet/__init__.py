"""Structured P2P overlay on the full transposition network, with a simulator."""

from .keyspace import DataPoint, SchemeConfig, node_key, owner
from .overlay import Network, audit
from .permutation import PermutationId, Transposition, generator_set, transpose
from .routing import greedy_lookup, heuristic_lookup, range_lookup
from .simulator import Metrics, SimConfig

__all__ = [
    "DataPoint",
    "Metrics",
    "Network",
    "PermutationId",
    "SchemeConfig",
    "SimConfig",
    "Transposition",
    "audit",
    "generator_set",
    "greedy_lookup",
    "heuristic_lookup",
    "node_key",
    "owner",
    "range_lookup",
    "transpose",
]
