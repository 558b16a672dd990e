"""Lookup algorithms over a :class:`~transnet.overlay.Network`.

Hop counts are overlay edge traversals. Computing the target identifier
and reading a local store are free.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple, Optional, Sequence

from .keyspace import DataPoint, SchemeConfig, node_key, normalize_point, owner, point_key
from .permutation import PermutationId, generator_set, matching_prefix_length

if TYPE_CHECKING:
    from .overlay import Network, NodeState, RoutingEntry

JUMP_AFTER = 2


@dataclass
class LookupResult:
    found: Optional[int]
    hops: int
    path: list
    attempts: int = 1
    jumps: int = 0

    @property
    def success(self) -> bool:
        return self.found is not None


class Hop(NamedTuple):
    src: int
    dst: int
    ring: bool  # travelled over a successor/predecessor link
    prefix_before: int
    prefix_after: int


def _inside(k: int, left: int, right: int, size: int) -> bool:
    if left == right:
        return True
    if left < right:
        return left < k <= right
    return k > left or k <= right


def candidate_distance(interval: tuple[int, int], target: int, size: int) -> int:
    """Clockwise ring distance from the interval ``(left, right]`` to ``target``.

    Zero when the target lies inside the interval. Measuring one way only
    makes every greedy hop strictly shrink the remaining distance.
    """
    left, right = interval
    if _inside(target, left, right, size):
        return 0
    return (target - right) % size


def _distance(left: int, right: int, t: int, size: int) -> int:
    if left == right:
        return 0
    if left < right:
        if left < t <= right:
            return 0
    elif t > left or t <= right:
        return 0
    return (t - right) % size


def detect_and_jump(
    tail: Sequence[Hop],
    current: "NodeState",
    target: PermutationId,
    network: "Network",
    threshold: int = JUMP_AFTER,
    visited: frozenset | set = frozenset(),
) -> Optional["RoutingEntry"]:
    """Break out of a serial walk along the ring.

    Fires when the last ``threshold`` hops were all ring-link moves that
    did not lengthen the prefix shared with ``target``. Returns the routing
    entry whose live node agrees with ``target`` on the longest prefix,
    provided that is longer than the current node's; ties go to the entry
    nearest the target key, then to generator order.
    """
    if threshold < 1 or len(tail) < threshold:
        return None
    for h in tail[-threshold:]:
        if not h.ring or h.prefix_after > h.prefix_before:
            return None
    here = matching_prefix_length(current.perm, target)
    t = node_key(network.scheme, target)
    nodes = network.nodes
    best = None
    best_rank = None
    for e in current.routing_table:
        r = nodes.get(e.resolved_key)
        if r is None or r.key == current.key or r.key in visited:
            continue
        gain = matching_prefix_length(r.perm, target)
        if gain <= here:
            continue
        rank = (-gain, _distance(r.predecessor, r.key, t, network.size))
        if best_rank is None or rank < best_rank:
            best, best_rank = e, rank
    return best


def greedy_lookup(
    network: "Network",
    start: int,
    k: int,
    *,
    jump_after: int = JUMP_AFTER,
    use_predecessor: bool = True,
) -> LookupResult:
    """Greedy search: at every node move to the neighbour nearest the
    target, where the target is the key of the identifier that would own
    ``k`` in a complete network.

    Candidates are the routing-table links plus the ring successor (and
    predecessor unless disabled). A link whose recorded interval has gone
    stale is checked against the live node before it is used; if it would
    not bring the message closer, the nearer ring neighbour is taken.
    Set ``jump_after=0`` to disable serial-move jumps.
    """
    scheme = network.scheme
    size = network.size
    nodes = network.nodes
    target = owner(scheme, k)
    t = node_key(scheme, target)

    cur = nodes[start]
    path = [start]
    tail: list[Hop] = []
    visited = {start}
    jumps = 0
    prefix = matching_prefix_length(cur.perm, target)
    limit = 2 * len(nodes) + 2

    while not _inside(t, cur.predecessor, cur.key, size):
        if len(path) > limit:
            raise RuntimeError(f"greedy lookup from {start} for {k} did not converge")
        here = _distance(cur.predecessor, cur.key, t, size)
        succ = nodes[cur.successor]
        best_key = succ.key
        best_d = _distance(succ.predecessor, succ.key, t, size)
        via_link = False
        for rkey, left in cur.links:
            d = _distance(left, rkey, t, size)
            if d < best_d and rkey in nodes:
                best_key, best_d, via_link = rkey, d, True
        if use_predecessor:
            pred = nodes[cur.predecessor]
            d = _distance(pred.predecessor, pred.key, t, size)
            if d < best_d:
                best_key, best_d, via_link = pred.key, d, False
        if via_link:
            cand = nodes[best_key]
            if _distance(cand.predecessor, cand.key, t, size) >= here:
                # stale entry: fall back to the better ring neighbour
                best_key = _ring_step(cur, nodes, t, size, use_predecessor)

        nxt = nodes[best_key]
        new_prefix = matching_prefix_length(nxt.perm, target)
        ring = best_key == cur.successor or best_key == cur.predecessor
        tail.append(Hop(cur.key, best_key, ring, prefix, new_prefix))
        path.append(best_key)
        visited.add(best_key)
        cur, prefix = nxt, new_prefix

        if jump_after and not _inside(t, cur.predecessor, cur.key, size):
            entry = detect_and_jump(tail, cur, target, network, jump_after, visited)
            if entry is not None:
                nxt = nodes[entry.resolved_key]
                new_prefix = matching_prefix_length(nxt.perm, target)
                tail.append(Hop(cur.key, nxt.key, False, prefix, new_prefix))
                path.append(nxt.key)
                visited.add(nxt.key)
                jumps += 1
                cur, prefix = nxt, new_prefix

    return LookupResult(cur.key, len(path) - 1, path, jumps=jumps)


def _ring_step(cur, nodes, t, size, use_predecessor) -> int:
    succ = nodes[cur.successor]
    if not use_predecessor:
        return succ.key
    pred = nodes[cur.predecessor]
    ds = _distance(succ.predecessor, succ.key, t, size)
    dp = _distance(pred.predecessor, pred.key, t, size)
    return pred.key if dp < ds else succ.key


def heuristic_lookup(
    network: "Network",
    start: int,
    k: int,
    max_attempts: int = 3,
    rng: Optional[random.Random] = None,
) -> LookupResult:
    """Digit-correcting search.

    At each node, find the leftmost position where its identifier differs
    from the target's and follow the link for the transposition that puts
    the target's symbol there. An attempt fails after ``2(n-1)`` hops or
    when the link leads nowhere new; the search then restarts from a
    random routing-table neighbour of ``start``. A failed search returns
    ``found=None`` rather than raising.
    """
    scheme = network.scheme
    size = network.size
    nodes = network.nodes
    n = scheme.n
    target = owner(scheme, k)
    t = node_key(scheme, target)
    budget = 2 * (n - 1)
    if rng is None:
        rng = random.Random(start * 1_000_003 + k)

    index = {g: i for i, g in enumerate(generator_set(n))}

    def walk(path: list) -> bool:
        cur = nodes[path[-1]]
        used = 0
        while not _inside(t, cur.predecessor, cur.key, size):
            if used == budget:
                return False
            perm = cur.perm
            i = next(pos for pos in range(n) if perm[pos] != target[pos])
            j = perm.index(target[i])
            e = cur.routing_table[index[(i + 1, j + 1)]]
            nxt = e.resolved_key
            if nxt == cur.key or nxt not in nodes:
                return False
            path.append(nxt)
            used += 1
            cur = nodes[nxt]
        return True

    path = [start]
    if walk(path):
        return LookupResult(path[-1], len(path) - 1, path)

    origin = nodes[start]
    tried = {start}
    attempts = 1
    while attempts < max_attempts:
        options = sorted(
            {e.resolved_key for e in origin.routing_table if e.resolved_key in nodes} - tried
        )
        if not options:
            break
        restart = rng.choice(options)
        tried.add(restart)
        attempts += 1
        path = [start, restart]
        if walk(path):
            return LookupResult(path[-1], len(path) - 1, path, attempts=attempts)
    return LookupResult(None, len(path) - 1, path, attempts=attempts)


@dataclass
class RangeResult:
    nodes: list  # (node key, sorted matching stored keys)
    hops: int
    path: list
    lookup: LookupResult = field(repr=False, default=None)

    def keys(self) -> list:
        return [k for _, ks in self.nodes for k in ks]


def _ring_walk(network: "Network", first: int, k_l: int, k_r: int) -> list:
    """Node keys from ``first`` clockwise until the interval holding ``k_r``."""
    size = network.size
    span = (k_r - k_l) % size
    out = [first]
    cur = network.nodes[first]
    while (cur.key - k_l) % size < span and cur.successor != first:
        cur = network.nodes[cur.successor]
        out.append(cur.key)
    return out


def range_lookup(network: "Network", start: int, k_l: int, k_r: int) -> RangeResult:
    """Collect stored keys in the ring range ``[k_l, k_r]`` (wraps if ``k_l > k_r``)."""
    size = network.size
    span = (k_r - k_l) % size
    first = greedy_lookup(network, start, k_l)
    visit = _ring_walk(network, first.found, k_l, k_r)
    out = []
    for key in visit:
        store = network.nodes[key].store
        out.append((key, sorted(x for x in store if (x - k_l) % size <= span)))
    path = first.path + visit[1:]
    return RangeResult(out, len(path) - 1, path, first)


@dataclass
class PointQueryResult:
    node: int
    points: list
    lookup: LookupResult


def multidim_point_query(network: "Network", start: int, x: DataPoint) -> PointQueryResult:
    pk = point_key(network.scheme, normalize_point(x))
    res = greedy_lookup(network, start, pk)
    stored = network.nodes[res.found].points.get(pk, [])
    return PointQueryResult(res.found, [p for p in stored if p == x], res)


@dataclass
class BoxQueryResult:
    points: list
    hops: int
    nodes: list


def multidim_range_query(
    network: "Network", start: int, lo: DataPoint, hi: DataPoint
) -> BoxQueryResult:
    """Every stored point inside the box ``[lo, hi]``.

    The key range between the corners' keys is a superset of the box, so
    points collected along the walk are filtered locally.
    """
    if any(a > b for a, b in zip(lo.coords, hi.coords)):
        raise ValueError("lo must be <= hi in every coordinate")
    scheme: SchemeConfig = network.scheme
    k_l = point_key(scheme, normalize_point(lo))
    k_r = point_key(scheme, normalize_point(hi))
    first = greedy_lookup(network, start, k_l)
    visit = _ring_walk(network, first.found, k_l, k_r)
    found = []
    for key in visit:
        for pk, pts in network.nodes[key].points.items():
            if k_l <= pk <= k_r:
                found.extend(p for p in pts if p.inside(lo, hi))
    path = first.path + visit[1:]
    return BoxQueryResult(found, len(path) - 1, visit)
