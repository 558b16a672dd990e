"""Structural checks on the complete full-transposition graph."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from .permutation import PermutationId, check_arity, generator_set, transpose

DIAMETER_MAX_N = 5
CONNECTIVITY_MAX_N = 4


def ftn_graph(n: int) -> nx.Graph:
    """All ``n!`` permutations, joined when one transposition apart."""
    check_arity(n)
    g = nx.Graph()
    gens = generator_set(n)
    for p in itertools.permutations(range(1, n + 1)):
        p = PermutationId._trusted(p)
        g.add_node(p)
        for t in gens:
            g.add_edge(p, transpose(p, t))
    return g


@dataclass
class FTNProps:
    n: int
    node_count: int
    degree: int
    diameter: Optional[int] = None
    vertex_connectivity: Optional[int] = None
    skipped: list = field(default_factory=list)

    def summary(self) -> str:
        def show(v):
            return "skipped" if v is None else str(v)

        return (
            f"n={self.n} nodes={self.node_count} degree={self.degree} "
            f"diameter={show(self.diameter)} "
            f"vertex_connectivity={show(self.vertex_connectivity)}"
        )


def ftn_graph_props(n: int, pairs: int = 50, seed: int = 0) -> FTNProps:
    """Node count, degree, diameter and vertex connectivity of the FTN.

    Diameter is computed exactly for ``n <= 5`` and connectivity (by
    max-flow minimum vertex cuts) for ``n <= 4``; larger arities mark those
    fields as skipped. Connectivity checks every non-adjacent pair for
    ``n = 3`` and ``pairs`` random non-adjacent pairs otherwise, which is
    enough for a vertex-transitive graph.
    """
    check_arity(n)
    ident = PermutationId.identity(n)
    degree = len({transpose(ident, t) for t in generator_set(n)})
    props = FTNProps(n, math.factorial(n), degree)
    if n > DIAMETER_MAX_N:
        props.skipped += ["diameter", "vertex_connectivity"]
        return props

    g = ftn_graph(n)
    degrees = {d for _, d in g.degree()}
    if degrees != {degree}:
        raise AssertionError(f"FTN is not regular: degrees {sorted(degrees)}")
    props.diameter = nx.diameter(g)

    if n > CONNECTIVITY_MAX_N:
        props.skipped.append("vertex_connectivity")
        return props
    nodes = sorted(g.nodes)
    candidates = [(s, t) for s, t in itertools.combinations(nodes, 2) if not g.has_edge(s, t)]
    if n > 3:
        candidates = random.Random(seed).sample(candidates, min(pairs, len(candidates)))
    aux = nx.algorithms.connectivity.build_auxiliary_node_connectivity(g)
    residual = nx.algorithms.flow.build_residual_network(aux, "capacity")
    props.vertex_connectivity = min(
        nx.algorithms.connectivity.local_node_connectivity(
            g, s, t, auxiliary=aux, residual=residual
        )
        for s, t in candidates
    )
    return props


def degree_vs_log_check(n: int) -> bool:
    """Whether the FTN degree ``n(n-1)/2`` exceeds ``log2(n!)``."""
    if n < 3:
        raise ValueError("n must be >= 3")
    return n * (n - 1) / 2 > math.log2(math.factorial(n))
