"""Seeded construction of overlays and the three experiment families.

Every function here is a pure function of its configuration: repetition
``r`` of a run seeded with ``s`` always draws from ``derive_seed(s, r)``.
"""

from __future__ import annotations

import logging
import math
import random
import statistics
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Iterable, Optional

from .chord import chord_lookup_hops
from .keyspace import SchemeConfig, perfect_load, valuation
from .overlay import Network
from .permutation import PermutationId, random_permutation
from .routing import greedy_lookup, heuristic_lookup

log = logging.getLogger(__name__)

ALGORITHMS = ("greedy", "heuristic")


def derive_seed(seed: int, repetition: int) -> int:
    return (seed * 1_000_003 + repetition) & 0xFFFF_FFFF_FFFF_FFFF


@dataclass(frozen=True)
class SimConfig:
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    m: int = 100
    seed: int = 0
    algorithm: str = "greedy"
    initiators: int = 100
    lookups_per_initiator: int = 100
    repetitions: int = 40

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        for name in ("m", "initiators", "lookups_per_initiator", "repetitions"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.m > math.factorial(self.scheme.n):
            raise ValueError(f"m={self.m} exceeds {self.scheme.n}! identifiers")


@dataclass
class Metrics:
    mean_hops: Optional[float] = None
    p95_hops: Optional[float] = None
    max_hops: Optional[int] = None
    success_rate: Optional[float] = None
    mean_distinct_table_entries: Optional[float] = None
    load_metric_A_mean: Optional[float] = None
    jump_rate: Optional[float] = None

    def check(self) -> None:
        for name in ("success_rate", "jump_rate"):
            v = getattr(self, name)
            if v is not None and not 0 <= v <= 1:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if None not in (self.mean_hops, self.p95_hops, self.max_hops):
            if not self.mean_hops <= self.p95_hops <= self.max_hops:
                raise ValueError(f"inconsistent hop stats {self}")


def aggregate(runs: Iterable[Metrics]) -> Metrics:
    """Mean of each metric over repetitions (max for ``max_hops``)."""
    runs = list(runs)
    out = Metrics()
    for f in fields(Metrics):
        vals = [getattr(r, f.name) for r in runs if getattr(r, f.name) is not None]
        if not vals:
            continue
        setattr(out, f.name, max(vals) if f.name == "max_hops" else statistics.fmean(vals))
    out.check()
    return out


def hop_metrics(hops: list) -> Metrics:
    if not hops:
        return Metrics()
    p95 = statistics.quantiles(hops, n=100, method="inclusive")[94] if len(hops) > 1 else hops[0]
    return Metrics(mean_hops=statistics.fmean(hops), p95_hops=p95, max_hops=max(hops))


def sample_permutations(n: int, count: int, rng: random.Random) -> list:
    """``count`` distinct uniform identifiers, redrawing on collision."""
    if count > math.factorial(n):
        raise ValueError(f"cannot draw {count} distinct permutations of {n} symbols")
    seen = set()
    out = []
    while len(out) < count:
        p = random_permutation(n, rng)
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def build_network(cfg: SimConfig, repetition: int = 0) -> Network:
    rng = random.Random(derive_seed(cfg.seed, repetition))
    net = Network(cfg.scheme)
    net.bulk_load(sample_permutations(cfg.scheme.n, cfg.m, rng))
    return net


def lookup_perf_repetition(cfg: SimConfig, repetition: int) -> Metrics:
    net = build_network(cfg, repetition)
    rng = random.Random(derive_seed(cfg.seed, repetition) ^ 0x9E3779B97F4A7C15)
    size = net.size
    starts = rng.sample(net.keys(), min(cfg.initiators, net.m))
    hops = []
    ok = jumped = total = 0
    for s in starts:
        for _ in range(cfg.lookups_per_initiator):
            k = rng.randrange(size)
            if cfg.algorithm == "greedy":
                res = greedy_lookup(net, s, k)
                jumped += res.jumps > 0
            else:
                res = heuristic_lookup(net, s, k, rng=rng)
            total += 1
            if res.success:
                if res.found != net.successor_of(k):
                    raise AssertionError(
                        f"lookup for {k} from {s} ended at {res.found}, "
                        f"owner is {net.successor_of(k)}"
                    )
                ok += 1
                hops.append(res.hops)
    out = hop_metrics(hops)
    out.success_rate = ok / total
    if cfg.algorithm == "greedy":
        out.jump_rate = jumped / total
    out.check()
    return out


def experiment_lookup_perf(cfg: SimConfig) -> Metrics:
    """Hop statistics of random lookups; heuristic hops count successes only."""
    return aggregate(lookup_perf_repetition(cfg, r) for r in range(cfg.repetitions))


def distinct_entries(net: Network) -> float:
    return statistics.fmean(
        len({e.resolved_key for e in node.routing_table}) for node in net.nodes.values()
    )


def routing_table_repetition(cfg: SimConfig, repetition: int) -> Metrics:
    return Metrics(mean_distinct_table_entries=distinct_entries(build_network(cfg, repetition)))


def experiment_routing_table(cfg: SimConfig) -> Metrics:
    """Average number of distinct live nodes a routing table points at."""
    return aggregate(routing_table_repetition(cfg, r) for r in range(cfg.repetitions))


def load_metric(scheme: SchemeConfig, perms: list) -> Fraction:
    """Mean relative deviation of adjacent valuation gaps from the ideal gap."""
    if len(perms) < 2:
        raise ValueError("need at least two identifiers")
    ideal = perfect_load(scheme, len(perms))
    vals = sorted(valuation(scheme, p) for p in perms)
    devs = [abs(ideal - (b - a)) / ideal for a, b in zip(vals, vals[1:])]
    return sum(devs, Fraction(0)) / len(devs)


def load_balance_repetition(cfg: SimConfig, count: int, repetition: int) -> Metrics:
    rng = random.Random(derive_seed(cfg.seed, repetition))
    perms = sample_permutations(cfg.scheme.n, count, rng)
    return Metrics(load_metric_A_mean=float(load_metric(cfg.scheme, perms)))


def experiment_load_balance(cfg: SimConfig, count: int) -> Metrics:
    """Spacing quality of ``count`` random identifiers under the scheme's valuation."""
    if count > math.factorial(cfg.scheme.n):
        raise ValueError("count exceeds n!")
    return aggregate(load_balance_repetition(cfg, count, r) for r in range(cfg.repetitions))


def chord_repetition(m: int, seed: int, repetition: int, lookups: int, initiators=None) -> Metrics:
    rng = random.Random(derive_seed(seed, repetition) ^ 0xC0D)
    out = hop_metrics(chord_lookup_hops(m, rng, lookups, initiators))
    out.success_rate = 1.0
    return out


def chord_baseline(m: int, seed: int, lookups: int, repetitions: int = 1, initiators=None) -> Metrics:
    """Mean hops of a 64-bit Chord ring with ``m`` nodes on the same seed family."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return aggregate(
        chord_repetition(m, seed, r, lookups, initiators) for r in range(repetitions)
    )


def complete_network(scheme: SchemeConfig) -> Network:
    """Every one of the ``n!`` identifiers live (only sensible for small n)."""
    import itertools

    net = Network(scheme)
    net.bulk_load(
        PermutationId._trusted(p) for p in itertools.permutations(range(1, scheme.n + 1))
    )
    return net


def with_m(cfg: SimConfig, m: int, seed: Optional[int] = None) -> SimConfig:
    return replace(cfg, m=m, seed=cfg.seed if seed is None else seed)
