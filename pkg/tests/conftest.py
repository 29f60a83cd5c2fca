from __future__ import annotations

from itertools import combinations

import pytest

from congest_mds.graph_model import Graph, generate, GraphSpec


def brute_mds_size(g: Graph) -> int:
    """Smallest dominating set size by plain subset enumeration."""
    closed = [{u, *g.adjacency[u]} for u in range(g.n)]
    everything = set(range(g.n))
    for k in range(g.n + 1):
        for combo in combinations(range(g.n), k):
            if set().union(*(closed[u] for u in combo)) == everything:
                return k
    raise AssertionError("unreachable")


def brute_setcover_size(sets: dict) -> int:
    universe = set().union(*map(set, sets.values())) if sets else set()
    keys = sorted(sets)
    for k in range(len(keys) + 1):
        for combo in combinations(keys, k):
            if set().union(*(set(sets[s]) for s in combo)) == universe:
                return k
    raise AssertionError("infeasible")


@pytest.fixture
def star6() -> Graph:
    """K(1,5): centre 0, leaves 1..5."""
    return generate(GraphSpec("star", n=6))[0]


@pytest.fixture
def p4() -> Graph:
    return generate(GraphSpec("path", n=4))[0]


@pytest.fixture
def k5() -> Graph:
    return generate(GraphSpec("complete", n=5))[0]


@pytest.fixture
def edgeless() -> Graph:
    return Graph.from_edges(5, [])
