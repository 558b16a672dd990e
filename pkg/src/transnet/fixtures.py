"""Scripted scenarios with hand-picked membership."""

from __future__ import annotations

from .keyspace import SchemeConfig, node_key
from .overlay import Network
from .permutation import PermutationId
from .routing import LookupResult, greedy_lookup

# Serial-move example, n = 6 under scheme A. START and BEFORE sit below
# ORIGIN on the ring and none of their transpositions land between them and
# TARGET, so greedy has to walk the ring; JUMP is the one link of ORIGIN
# that puts the target's leading symbol in place.
FIG2 = {
    "START": "354216",
    "BEFORE": "364251",
    "ORIGIN": "365241",
    "SUCCESSOR": "365421",
    "TARGET": "413562",
    "JUMP": "465231",
}


def fig2_network() -> Network:
    net = Network(SchemeConfig("A", 6))
    net.bulk_load(PermutationId.parse(s) for s in FIG2.values())
    return net


def fig2_key(name: str) -> int:
    return node_key(SchemeConfig("A", 6), PermutationId.parse(FIG2[name]))


def fig2_lookups(net: Network | None = None) -> tuple[LookupResult, LookupResult]:
    """Greedy search for TARGET's key from ORIGIN, then from START."""
    net = net or fig2_network()
    target = fig2_key("TARGET")
    direct = greedy_lookup(net, fig2_key("ORIGIN"), target)
    serial = greedy_lookup(net, fig2_key("START"), target)
    return direct, serial


def fig2_walkthrough() -> list[str]:
    net = fig2_network()
    direct, serial = fig2_lookups(net)

    def show(path):
        return " -> ".join(str(net.nodes[k].perm) for k in path)

    return [
        f"live ids: {', '.join(str(net.nodes[k].perm) for k in net.keys())}",
        f"target id {FIG2['TARGET']} (key {fig2_key('TARGET')})",
        f"from {FIG2['ORIGIN']}: {show(direct.path)}  "
        f"[{direct.hops} hops; first move to ring successor {FIG2['SUCCESSOR']}, "
        f"not {FIG2['JUMP']}]",
        f"from {FIG2['START']}: {show(serial.path)}  "
        f"[{serial.hops} hops, {serial.jumps} jump after two ring moves]",
    ]
