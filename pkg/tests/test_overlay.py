import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tests import oracles
from tests.conftest import all_perms
from transnet.keyspace import SchemeConfig, node_key
from transnet.overlay import (
    IdCollision,
    JoinError,
    KeyInterval,
    KeyNotFound,
    Network,
    NodeState,
    audit,
    neighbor_keys,
    responsible_interval,
)
from transnet.permutation import PermutationId, generator_set, random_permutation, transpose
from transnet.simulator import complete_network


def P(*xs):
    return PermutationId(xs)


def loaded(scheme, count, seed):
    rng = random.Random(seed)
    perms = rng.sample([PermutationId(p) for p in all_perms(scheme.n)], count)
    net = Network(scheme)
    net.bulk_load(perms)
    return net


def snapshot(net):
    return {
        k: (n.predecessor, n.successor, dict(n.store), [e.resolved_key for e in n.routing_table])
        for k, n in net.nodes.items()
    }


def brute_check(net):
    """Quiescent invariants, recomputed from scratch."""
    keys = list(net.nodes)
    size = net.size
    covered = set()
    for k, node in net.nodes.items():
        assert node.successor == oracles.successor(keys, k + 1 if k + 1 < size else 0) or len(keys) == 1
        assert node.predecessor == oracles.predecessor(keys, k) or len(keys) == 1
        mine = oracles.members(node.predecessor, k, size)
        assert not (covered & mine)
        covered |= mine
        for e in node.routing_table:
            assert e.ideal_key == node_key(net.scheme, e.ideal_perm)
            assert e.resolved_key == oracles.successor(keys, e.ideal_key)
        for sk in node.store:
            assert sk in mine
    assert covered == set(range(size))


class TestResponsibleInterval:
    def test_single_node(self):
        node = NodeState(P(1, 2, 3), 5, 5, 5)
        iv = responsible_interval(node, (0, 59))
        assert all(iv.contains(k, 60) for k in range(60))
        assert iv.spans(60) == [(0, 59)]

    def test_plain(self):
        iv = responsible_interval(NodeState(P(1, 2, 3), 20, 10, 30), (0, 59))
        assert iv == KeyInterval(10, 20)
        assert {k for k in range(60) if iv.contains(k, 60)} == set(range(11, 21))

    def test_wrap(self):
        iv = responsible_interval(NodeState(P(1, 2, 3), 5, 50, 9), (0, 59))
        want = oracles.members(50, 5, 60)
        assert want == set(range(51, 60)) | set(range(0, 6))
        assert {k for k in range(60) if iv.contains(k, 60)} == want
        assert iv.spans(60) == [(51, 59), (0, 5)]

    def test_outside_keyspace(self):
        with pytest.raises(ValueError):
            responsible_interval(NodeState(P(1, 2, 3), 70, 5, 5), (0, 59))


class TestRoutingTable:
    def test_substitution_example(self):
        net = Network(SchemeConfig("B", 3))
        net.bulk_load([P(1, 2, 3), P(3, 2, 1)])
        node = net.nodes[0]
        entry = next(e for e in node.routing_table if e.ideal_perm == (2, 1, 3))
        assert entry.ideal_key == 2
        assert entry.resolved_key == 5
        assert net.nodes[5].perm == (3, 2, 1)

    def test_single_node_resolves_to_self(self):
        net = Network(SchemeConfig("B", 5))
        net.join(P(2, 1, 3, 5, 4))
        (node,) = net.nodes.values()
        assert len(node.routing_table) == 10
        assert {e.resolved_key for e in node.routing_table} == {node.key}
        assert node.interval.left == node.interval.right

    @pytest.mark.parametrize("variant", ["A", "B"])
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_complete_network_is_the_ftn(self, variant, n):
        net = complete_network(SchemeConfig(variant, n))
        assert len(net) == math.factorial(n)
        by_key = {k: node.perm for k, node in net.nodes.items()}
        edges = set()
        for node in net.nodes.values():
            assert len(node.routing_table) == n * (n - 1) // 2
            for e in node.routing_table:
                assert e.resolved_key == e.ideal_key
                edges.add(frozenset((node.perm, by_key[e.resolved_key])))
        want = {
            frozenset((p, oracles.swap(p, i, j)))
            for p in all_perms(n)
            for i in range(1, n + 1)
            for j in range(i + 1, n + 1)
        }
        assert edges == want

    @pytest.mark.parametrize("scheme", [SchemeConfig("A", 5), SchemeConfig("B", 5), SchemeConfig("B", 5, 3)])
    def test_matches_brute_force(self, scheme):
        net = loaded(scheme, 40, 1)
        brute_check(net)
        assert audit(net) == []

    @pytest.mark.parametrize("scheme", [SchemeConfig("A", 6), SchemeConfig("B", 6), SchemeConfig("B", 4, 7)])
    def test_neighbor_keys(self, scheme):
        for p in all_perms(scheme.n)[::7]:
            p = PermutationId(p)
            want = [node_key(scheme, transpose(p, t)) for t in generator_set(scheme.n)]
            assert neighbor_keys(scheme, p) == want

    def test_refresh_idempotent(self):
        net = loaded(SchemeConfig("B", 5), 30, 2)
        before = snapshot(net)
        assert net.refresh_all() == 0
        assert snapshot(net) == before


class TestJoin:
    def test_empty_network(self):
        net = Network(SchemeConfig("A", 4))
        report = net.join(P(2, 4, 1, 3))
        assert report.lookups == 0
        assert len(net) == 1
        brute_check(net)

    def test_collision(self):
        net = loaded(SchemeConfig("B", 5), 10, 3)
        existing = next(iter(net.nodes.values())).perm
        with pytest.raises(IdCollision):
            net.join(existing, net.keys()[0])

    def test_dead_bootstrap(self):
        net = loaded(SchemeConfig("B", 5), 10, 3)
        free = next(PermutationId(p) for p in all_perms(5) if node_key(net.scheme, PermutationId(p)) not in net)
        with pytest.raises(JoinError):
            net.join(free, 10**6)

    def test_arity_mismatch(self):
        net = loaded(SchemeConfig("B", 5), 10, 3)
        with pytest.raises(ValueError):
            net.join(P(1, 2, 3), net.keys()[0])

    @pytest.mark.parametrize("variant", ["A", "B"])
    def test_join_migrates_and_costs(self, variant):
        scheme = SchemeConfig(variant, 6)
        net = loaded(scheme, 60, 4)
        rng = random.Random(4)
        stored = set()
        for _ in range(400):
            k = rng.randrange(net.size)
            net.insert_key(rng.choice(net.keys()), k, k)
            stored.add(k)
        n = scheme.n
        gens = n * (n - 1) // 2
        for _ in range(30):
            p = random_permutation(n, rng)
            if node_key(scheme, p) in net:
                continue
            report = net.join(p, rng.choice(net.keys()))
            assert report.lookups == 1 + gens
            # each lookup is at most a walk over the ring, in practice far less
            assert report.hops <= report.lookups * len(net)
            assert net.total_stored() == len(stored)
            node = net.nodes[report.key]
            for sk in node.store:
                assert node.interval.contains(sk, net.size)
        net.refresh_all()
        brute_check(net)
        for k in stored:
            start = rng.choice(net.keys())
            payload, res = net.get_key(start, k)
            assert payload == k
            assert res.found == oracles.successor(list(net.nodes), k)


class TestLeave:
    def test_transfer_and_notifications(self):
        scheme = SchemeConfig("B", 6)
        net = loaded(scheme, 80, 5)
        rng = random.Random(5)
        for _ in range(300):
            k = rng.randrange(net.size)
            net.insert_key(net.keys()[0], k, -k)
        total = net.total_stored()
        for _ in range(40):
            leaving = rng.choice(net.keys())
            held = set(net.nodes[leaving].store)
            succ = net.nodes[leaving].successor
            report = net.leave(leaving)
            assert report.notifications <= 15 + 2
            assert report.transferred == len(held)
            assert held <= set(net.nodes[succ].store)
            assert net.total_stored() == total
            for k in held:
                assert net.get_key(rng.choice(net.keys()), k)[0] == -k
        net.refresh_all()
        brute_check(net)

    def test_last_node(self):
        net = Network(SchemeConfig("B", 4))
        net.join(P(1, 2, 3, 4))
        net.leave(net.keys()[0])
        assert len(net) == 0

    def test_unknown(self):
        net = loaded(SchemeConfig("B", 4), 5, 0)
        with pytest.raises(KeyError):
            net.leave(10**9)

    @pytest.mark.parametrize("variant", ["A", "B"])
    def test_join_leave_round_trip(self, variant):
        net = loaded(SchemeConfig(variant, 5), 30, 6)
        rng = random.Random(6)
        for _ in range(100):
            net.insert_key(net.keys()[0], rng.randrange(net.size))
        before = snapshot(net)
        free = [PermutationId(p) for p in all_perms(5) if node_key(net.scheme, PermutationId(p)) not in net]
        report = net.join(free[17], net.keys()[3])
        net.leave(report.key)
        net.refresh_all()
        assert snapshot(net) == before

    def test_stale_entries_bounded(self):
        net = loaded(SchemeConfig("B", 6), 100, 7)
        victim = net.nodes[net.keys()[10]]
        # links to the leaver and to its successor (whose interval grows) go stale
        touched = {victim.key, victim.successor}
        watchers = {
            k for k, n in net.nodes.items() if any(e.resolved_key in touched for e in n.routing_table)
        }
        net.leave(victim.key)
        for k in net.keys():
            stale = net.stale_entries(k)
            assert 0 <= stale <= 15
            if k not in watchers and k != victim.predecessor and k != victim.successor:
                assert stale == 0


class TestData:
    def test_insert_lookup_delete(self):
        net = loaded(SchemeConfig("A", 5), 25, 8)
        rng = random.Random(8)
        k = rng.randrange(net.size)
        net.insert_key(net.keys()[0], k, "payload")
        owner_key = oracles.successor(net.keys(), k)
        for _ in range(10):
            payload, res = net.get_key(rng.choice(net.keys()), k)
            assert payload == "payload" and res.found == owner_key
        net.delete_key(net.keys()[1], k)
        with pytest.raises(KeyNotFound):
            net.get_key(net.keys()[2], k)
        with pytest.raises(KeyNotFound):
            net.delete_key(net.keys()[2], k)

    def test_insert_at_own_key_is_local(self):
        net = loaded(SchemeConfig("B", 5), 25, 9)
        k = net.keys()[4]
        res = net.insert_key(k, k, 1)
        assert res.hops == 0 and res.found == k
        assert k in net.nodes[k].store

    def test_out_of_range(self):
        net = loaded(SchemeConfig("B", 4), 5, 0)
        with pytest.raises(ValueError):
            net.insert_key(net.keys()[0], net.size)


@settings(max_examples=25)
@given(
    seed=st.integers(0, 2**32),
    variant=st.sampled_from(["A", "B"]),
    n=st.integers(4, 6),
)
def test_churn_preserves_invariants(seed, variant, n):
    scheme = SchemeConfig(variant, n)
    rng = random.Random(seed)
    net = Network(scheme)
    net.join(random_permutation(n, rng))
    stored = {}
    for _ in range(200):
        op = rng.choice(("join", "join", "leave", "insert", "insert", "delete"))
        if op == "join" and len(net) < math.factorial(n):
            p = random_permutation(n, rng)
            try:
                net.join(p, rng.choice(net.keys()))
            except IdCollision:
                assert node_key(scheme, p) in net
        elif op == "leave" and len(net) > 1:
            net.leave(rng.choice(net.keys()))
        elif op == "insert":
            k = rng.randrange(net.size)
            res = net.insert_key(rng.choice(net.keys()), k, k)
            assert res.found == oracles.successor(net.keys(), k)
            stored[k] = k
        elif op == "delete" and stored:
            k = rng.choice(sorted(stored))
            net.delete_key(rng.choice(net.keys()), k)
            del stored[k]
        assert net.total_stored() == len(stored)
        for k, node in net.nodes.items():
            assert net.nodes[node.successor].predecessor == k
    net.refresh_all()
    assert audit(net) == []
    brute_check(net)
    held = {k: v for node in net.nodes.values() for k, v in node.store.items()}
    assert held == stored
