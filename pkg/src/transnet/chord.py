"""Static Chord ring used as the lookup-cost baseline."""

from __future__ import annotations

import bisect
import random
from typing import Optional


class ChordRing:
    """Chord over a ``bits``-bit identifier circle with full finger tables.

    No stabilization: the ring is built once and stays quiescent.
    """

    def __init__(self, ids, bits: int = 64):
        self.bits = bits
        self.space = 1 << bits
        self.ids = sorted(set(ids))
        if not self.ids:
            raise ValueError("a ring needs at least one node")
        self._index = {x: i for i, x in enumerate(self.ids)}
        # per node: fingers as (clockwise distance, node id), deduplicated
        self._fingers = [self._build_fingers(x) for x in self.ids]

    @classmethod
    def random(cls, m: int, rng: random.Random, bits: int = 64) -> "ChordRing":
        ids = set()
        while len(ids) < m:
            ids.add(rng.getrandbits(bits))
        return cls(ids, bits)

    def __len__(self) -> int:
        return len(self.ids)

    def successor(self, k: int) -> int:
        i = bisect.bisect_left(self.ids, k % self.space)
        return self.ids[i % len(self.ids)]

    def _build_fingers(self, x: int):
        dists, nodes = [], []
        for i in range(self.bits):
            f = self.successor(x + (1 << i))
            d = (f - x) % self.space
            if f != x and (not dists or d > dists[-1]):
                dists.append(d)
                nodes.append(f)
        return dists, nodes

    def closest_preceding_finger(self, x: int, k: int) -> int:
        dists, nodes = self._fingers[self._index[x]]
        i = bisect.bisect_left(dists, (k - x) % self.space) - 1
        return nodes[i] if i >= 0 else x

    def lookup(self, start: int, k: int) -> tuple[int, int]:
        """Route to the node responsible for ``k``; returns ``(node, hops)``.

        Hops follow the usual Chord accounting: forwards until the query
        reaches the key's predecessor, which answers with its successor.
        """
        space = self.space
        x = start
        hops = 0
        while True:
            i = self._index[x]
            pred = self.ids[i - 1]
            if len(self.ids) == 1 or pred == x or _between(k, pred, x, space):
                return x, hops
            succ = self.ids[(i + 1) % len(self.ids)]
            if _between(k, x, succ, space):
                return succ, hops
            nxt = self.closest_preceding_finger(x, k)
            x = succ if nxt == x else nxt
            hops += 1


def _between(k: int, left: int, right: int, space: int) -> bool:
    """``k`` in the ring interval ``(left, right]``."""
    if left < right:
        return left < k <= right
    return k > left or k <= right


def chord_lookup_hops(
    m: int, rng: random.Random, lookups: int, initiators: Optional[int] = None
) -> list[int]:
    """Hop counts of seeded random lookups on a fresh ring of ``m`` nodes.

    With ``initiators`` set, lookups are spread evenly over that many
    randomly chosen start nodes.
    """
    ring = ChordRing.random(m, rng)
    out = []
    if initiators:
        starts = rng.sample(ring.ids, min(initiators, m))
        per = lookups // len(starts)
        for s in starts:
            for _ in range(per):
                k = rng.getrandbits(ring.bits)
                node, hops = ring.lookup(s, k)
                out.append(hops)
    else:
        for _ in range(lookups):
            s = rng.choice(ring.ids)
            k = rng.getrandbits(ring.bits)
            node, hops = ring.lookup(s, k)
            out.append(hops)
    return out
