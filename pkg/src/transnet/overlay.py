"""Peer state, the successor ring, and membership changes.

A :class:`Network` is a simulation of the whole overlay. It keeps a global
sorted index of live node keys, which stands in for "ask the ring who the
immediate successor is"; joins still pay for that knowledge with real
lookups so their message cost is measurable.
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, NamedTuple, Optional

from .keyspace import DataPoint, SchemeConfig, node_key
from .permutation import PermutationId, Transposition, generator_set, transpose
from . import routing

log = logging.getLogger(__name__)


class IdCollision(Exception):
    """A joining node's key is already taken; draw a new identifier."""


class JoinError(Exception):
    pass


class KeyNotFound(KeyError):
    pass


class KeyInterval(NamedTuple):
    """Half-open ring interval ``(left, right]``; ``left == right`` is the
    whole key space (a lone node)."""

    left: int
    right: int

    def contains(self, k: int, size: int) -> bool:
        return in_interval(k, self.left, self.right, size)

    def spans(self, size: int) -> list[tuple[int, int]]:
        """Closed integer ranges covered, splitting at the wrap point."""
        left, right = self.left, self.right
        if left == right:
            return [(0, size - 1)]
        if left < right:
            return [(left + 1, right)]
        out = []
        if left + 1 <= size - 1:
            out.append((left + 1, size - 1))
        out.append((0, right))
        return out


def in_interval(k: int, left: int, right: int, size: int) -> bool:
    if left == right:
        return True
    if left < right:
        return left < k <= right
    return k > left or k <= right


class RoutingEntry(NamedTuple):
    generator: Transposition
    ideal_perm: PermutationId
    ideal_key: int
    resolved_key: int
    resolved_interval: KeyInterval


@dataclass(eq=False)
class NodeState:
    perm: PermutationId
    key: int
    predecessor: int
    successor: int
    routing_table: list = field(default_factory=list)
    store: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    # (resolved_key, left bound) per distinct target, in generator order
    links: tuple = ()

    @property
    def interval(self) -> KeyInterval:
        return KeyInterval(self.predecessor, self.key)

    def set_table(self, entries: list) -> None:
        self.routing_table = entries
        seen = set()
        links = []
        for e in entries:
            if e.resolved_key not in seen:
                seen.add(e.resolved_key)
                links.append((e.resolved_key, e.resolved_interval.left))
        self.links = tuple(links)

    def point_count(self) -> int:
        return sum(len(v) for v in self.points.values())


def responsible_interval(node: NodeState, keyspace: tuple[int, int]) -> KeyInterval:
    """Keys served by ``node``. ``keyspace`` is only used for validation."""
    lo, hi = keyspace
    if not (lo <= node.predecessor <= hi and lo <= node.key <= hi):
        raise ValueError("node keys outside the key space")
    return node.interval


@dataclass
class JoinReport:
    key: int
    lookups: int = 0
    hops: int = 0
    notifications: int = 0
    migrated: int = 0

    @property
    def messages(self) -> int:
        return self.hops + self.notifications


@dataclass
class LeaveReport:
    key: int
    notifications: int = 0
    transferred: int = 0


class Network:
    """All live peers of one overlay instance.

    Single-writer: membership and store mutations must be serialized.
    """

    def __init__(self, scheme: SchemeConfig):
        self.scheme = scheme
        self.size = scheme.size
        self.nodes: dict[int, NodeState] = {}
        self._keys: list[int] = []

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key: int) -> bool:
        return key in self.nodes

    def __repr__(self) -> str:
        s = self.scheme
        return f"<Network scheme={s.variant} n={s.n} K={s.K} m={len(self)}>"

    @property
    def m(self) -> int:
        return len(self._keys)

    @property
    def keyspace(self) -> tuple[int, int]:
        return 0, self.size - 1

    def keys(self) -> list[int]:
        """Live node keys in ring order."""
        return list(self._keys)

    def node(self, key: int) -> NodeState:
        return self.nodes[key]

    def successor_of(self, k: int) -> int:
        """Key of the live node responsible for ``k`` (first live key >= k, wrapping)."""
        if not self._keys:
            raise LookupError("empty network")
        i = bisect.bisect_left(self._keys, k)
        return self._keys[i] if i < len(self._keys) else self._keys[0]

    def responsible_node(self, k: int) -> NodeState:
        return self.nodes[self.successor_of(k)]

    def interval_of(self, key: int) -> KeyInterval:
        return self.nodes[key].interval

    # -- routing tables -------------------------------------------------

    def build_routing_table(self, node: NodeState) -> list:
        """One entry per generator, each resolved to the live successor of
        its ideal key."""
        return build_routing_table(node, self)

    def refresh_routing_table(self, key: int) -> int:
        """Rebuild one table against current membership; returns the number
        of entries that changed."""
        node = self.nodes[key]
        fresh = build_routing_table(node, self)
        changed = sum(1 for a, b in zip(node.routing_table, fresh) if a != b)
        changed += abs(len(fresh) - len(node.routing_table))
        node.set_table(fresh)
        return changed

    def refresh_all(self) -> int:
        return sum(self.refresh_routing_table(k) for k in self._keys)

    def stale_entries(self, key: int) -> int:
        node = self.nodes[key]
        fresh = build_routing_table(node, self)
        return sum(1 for a, b in zip(node.routing_table, fresh) if a != b)

    # -- membership -----------------------------------------------------

    def _splice(self, perm: PermutationId, key: int) -> NodeState:
        if key in self.nodes:
            raise IdCollision(f"key {key} already taken by {self.nodes[key].perm}")
        if not self._keys:
            node = NodeState(perm, key, key, key)
        else:
            succ = self.nodes[self.successor_of(key)]
            pred = self.nodes[succ.predecessor]
            node = NodeState(perm, key, pred.key, succ.key)
            pred.successor = key
            succ.predecessor = key
        bisect.insort(self._keys, key)
        self.nodes[key] = node
        return node

    def bulk_load(self, perms: Iterable[PermutationId]) -> None:
        """Splice many nodes in sequence, then build every table once.

        Same end state as joining them one by one and refreshing.
        """
        for p in perms:
            self._splice(p, node_key(self.scheme, p))
        self.refresh_all()

    def join(self, perm: PermutationId, bootstrap: Optional[int] = None) -> JoinReport:
        """Add a node the way a peer would: locate its successor through
        ``bootstrap``, splice into the ring, take over its share of the
        successor's keys, then resolve every routing link by lookup.

        Raises :class:`IdCollision` if the key is already live.
        """
        if perm.n != self.scheme.n:
            raise ValueError(f"arity mismatch: {perm.n} vs {self.scheme.n}")
        key = node_key(self.scheme, perm)
        report = JoinReport(key)
        if not self._keys:
            node = self._splice(perm, key)
            node.set_table(build_routing_table(node, self))
            return report
        if bootstrap is None or bootstrap not in self.nodes:
            raise JoinError(f"bootstrap {bootstrap} is not a live node")

        found = routing.greedy_lookup(self, bootstrap, key)
        report.lookups += 1
        report.hops += found.hops
        if found.found == key:
            raise IdCollision(f"key {key} already taken")

        node = self._splice(perm, key)
        report.notifications += 2
        succ = self.nodes[node.successor]
        report.migrated = _migrate(succ, node, self.size)

        entries = []
        for g in generator_set(self.scheme.n):
            ideal = transpose(perm, g)
            ideal_key = node_key(self.scheme, ideal)
            res = routing.greedy_lookup(self, key, ideal_key)
            report.lookups += 1
            report.hops += res.hops
            target = self.nodes[res.found]
            entries.append(RoutingEntry(g, ideal, ideal_key, target.key, target.interval))
        node.set_table(entries)
        return report

    def leave(self, key: int) -> LeaveReport:
        """Remove a node; its keys and points pass to its successor.

        Other nodes' links to it go stale and are repaired on refresh.
        """
        node = self.nodes.get(key)
        if node is None:
            raise KeyError(f"{key} is not a live node")
        report = LeaveReport(key)
        contacts = {e.resolved_key for e in node.routing_table}
        contacts.update((node.predecessor, node.successor))
        contacts.discard(key)
        report.notifications = len(contacts)

        del self.nodes[key]
        del self._keys[bisect.bisect_left(self._keys, key)]
        if not self._keys:
            return report
        succ = self.nodes[node.successor]
        pred = self.nodes[node.predecessor]
        succ.predecessor = pred.key
        pred.successor = succ.key
        report.transferred = len(node.store) + node.point_count()
        succ.store.update(node.store)
        for pk, pts in node.points.items():
            succ.points.setdefault(pk, []).extend(pts)
        return report

    # -- data -----------------------------------------------------------

    def insert_key(self, start: int, k: int, payload: Any = None) -> "routing.LookupResult":
        self._check_key(k)
        res = routing.greedy_lookup(self, start, k)
        self.nodes[res.found].store[k] = payload
        return res

    def delete_key(self, start: int, k: int) -> "routing.LookupResult":
        self._check_key(k)
        res = routing.greedy_lookup(self, start, k)
        store = self.nodes[res.found].store
        if k not in store:
            raise KeyNotFound(k)
        del store[k]
        return res

    def get_key(self, start: int, k: int) -> tuple[Any, "routing.LookupResult"]:
        self._check_key(k)
        res = routing.greedy_lookup(self, start, k)
        store = self.nodes[res.found].store
        if k not in store:
            raise KeyNotFound(k)
        return store[k], res

    def insert_point(self, start: int, x: DataPoint) -> "routing.LookupResult":
        from .keyspace import normalize_point, point_key

        pk = point_key(self.scheme, normalize_point(x))
        res = routing.greedy_lookup(self, start, pk)
        self.nodes[res.found].points.setdefault(pk, []).append(x)
        return res

    def _check_key(self, k: int) -> None:
        if not 0 <= k < self.size:
            raise ValueError(f"key {k} outside [0, {self.size - 1}]")

    def total_stored(self) -> int:
        return sum(len(n.store) + n.point_count() for n in self.nodes.values())


def build_routing_table(node: NodeState, network: Network) -> list:
    scheme = network.scheme
    nodes = network.nodes
    perm = node.perm
    succ = network.successor_of
    entries = []
    for g, ideal_key in zip(generator_set(scheme.n), neighbor_keys(scheme, perm)):
        target = nodes[succ(ideal_key)]
        s = list(perm)
        s[g.i - 1], s[g.j - 1] = s[g.j - 1], s[g.i - 1]
        entries.append(
            RoutingEntry(
                g,
                PermutationId._trusted(s),
                ideal_key,
                target.key,
                KeyInterval(target.predecessor, target.key),
            )
        )
    return entries


def neighbor_keys(scheme: SchemeConfig, p: PermutationId) -> list[int]:
    """``node_key`` of every transposition of ``p``, in generator order,
    computed incrementally from ``p``'s own key."""
    n = scheme.n
    out = []
    if scheme.variant == "A":
        base = n + 1
        weight = [base ** (n - 1 - i) for i in range(n)]
        v = node_key(scheme, p)
        for i in range(n):
            for j in range(i + 1, n):
                out.append(v + (p[j] - p[i]) * (weight[i] - weight[j]))
        return out

    from math import factorial

    fact = [factorial(n - 1 - i) for i in range(n)]
    # below[i][v]: symbols smaller than v to the right of position i
    below = [None] * n
    row = [0] * (n + 2)
    below[n - 1] = row
    for i in range(n - 2, -1, -1):
        x = p[i + 1]
        row = row[: x + 1] + [c + 1 for c in row[x + 1:]]
        below[i] = row
    code = [below[i][p[i]] for i in range(n)]
    base = (sum(w * f for w, f in zip(code, fact)) + 1) * scheme.K - 1
    K = scheme.K
    for i in range(n):
        a = p[i]
        for j in range(i + 1, n):
            b = p[j]
            # Only Lehmer digits at positions i..j change.
            delta = (below[i][b] + (a < b) - code[i]) * fact[i]
            delta += (below[j][a] - code[j]) * fact[j]
            lo, hi, sign = (a, b, 1) if a < b else (b, a, -1)
            for k in range(i + 1, j):
                if lo < p[k] < hi:
                    delta += sign * fact[k]
            out.append(base + delta * K)
    return out


def _migrate(src: NodeState, dst: NodeState, size: int) -> int:
    """Move the part of ``src``'s store that now falls in ``dst``'s interval."""
    left, right = dst.predecessor, dst.key
    moved = [k for k in src.store if in_interval(k, left, right, size)]
    for k in moved:
        dst.store[k] = src.store.pop(k)
    count = len(moved)
    for pk in [pk for pk in src.points if in_interval(pk, left, right, size)]:
        pts = src.points.pop(pk)
        dst.points[pk] = pts
        count += len(pts)
    return count


def audit(network: Network) -> list[str]:
    """Check the quiescent-state invariants; returns human-readable problems."""
    problems = []
    keys = network.keys()
    size = network.size
    m = len(keys)
    for idx, k in enumerate(keys):
        node = network.nodes[k]
        if node.key != k or node_key(network.scheme, node.perm) != k:
            problems.append(f"{k}: key does not match identifier {node.perm}")
        want_succ = keys[(idx + 1) % m]
        want_pred = keys[idx - 1]
        if node.successor != want_succ:
            problems.append(f"{k}: successor {node.successor} != {want_succ}")
        if node.predecessor != want_pred:
            problems.append(f"{k}: predecessor {node.predecessor} != {want_pred}")
        if len(node.routing_table) != len(generator_set(network.scheme.n)):
            problems.append(f"{k}: table has {len(node.routing_table)} entries")
        for e in node.routing_table:
            want = network.successor_of(e.ideal_key)
            if e.resolved_key != want:
                problems.append(f"{k}: entry {e.generator} -> {e.resolved_key}, want {want}")
            elif e.resolved_interval != network.nodes[want].interval:
                problems.append(f"{k}: entry {e.generator} has stale interval")
        for sk in node.store:
            if not in_interval(sk, node.predecessor, k, size):
                problems.append(f"{k}: stores foreign key {sk}")
        for pk in node.points:
            if not in_interval(pk, node.predecessor, k, size):
                problems.append(f"{k}: stores foreign point key {pk}")
    # Intervals tile the ring exactly when every node's left bound is its
    # ring predecessor, which is checked above; count covered keys to be sure.
    if m:
        covered = sum(((k - network.nodes[k].predecessor - 1) % size) + 1 for k in keys)
        if covered != size:
            problems.append(f"intervals cover {covered} of {size} keys")
    return problems
