import math

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from congest_mds.forest_decomp import (
    DecompConfig,
    PromiseViolation,
    check_decomposition,
    decompose,
    orient_and_assign,
    peel_levels,
)
from congest_mds.graph_model import GraphSpec, generate


def test_config_threshold_and_cap():
    cfg = DecompConfig(alpha=2)
    assert cfg.threshold == 6
    assert cfg.level_cap(1024) == math.ceil(math.log(1024) / math.log(1.5)) + 1
    assert DecompConfig(alpha=3, epsilon="1/2").threshold == 8  # ceil(2.5 * 3)
    with pytest.raises(ValueError):
        DecompConfig(alpha=0)
    with pytest.raises(ValueError):
        DecompConfig(alpha=1, epsilon=0)


def test_peel_p4(p4):
    levels, trace = peel_levels(p4, DecompConfig(1))
    assert levels == [1, 1, 1, 1]
    assert trace.rounds_executed == 1


def test_peel_star(star6):
    levels, trace = peel_levels(star6, DecompConfig(1))
    assert levels == [2, 1, 1, 1, 1, 1]
    assert trace.rounds_executed == 2


def test_k5_violates_alpha_one(k5):
    with pytest.raises(PromiseViolation) as info:
        peel_levels(k5, DecompConfig(1))
    assert info.value.node == 0
    assert info.value.level_cap == DecompConfig(1).level_cap(5)


def test_k5_fine_with_alpha_three(k5):
    levels, _ = peel_levels(k5, DecompConfig(3))
    assert levels == [1] * 5


def test_orient_p4(p4):
    fd, trace = orient_and_assign(p4, [1, 1, 1, 1], 3)
    assert fd.parents == (((1, 1),), ((2, 1),), ((3, 1),), ())
    assert fd.forests == 1
    assert trace.rounds_executed == 2


def test_orient_star(star6):
    fd = decompose(star6, DecompConfig(1)).decomposition
    assert fd.parents[0] == ()
    assert all(fd.parents[leaf] == ((0, 1),) for leaf in range(1, 6))
    assert fd.children[0] == tuple((leaf, 1) for leaf in range(1, 6))
    assert fd.forests == 1


def test_index_assignment_follows_parent_id():
    # node 0 is a leaf of level 1 adjacent to three higher nodes
    g = generate(GraphSpec("complete", n=4))[0]
    fd = decompose(g, DecompConfig(2)).decomposition
    assert fd.parents[0] == ((1, 1), (2, 2), (3, 3))
    assert fd.parents[3] == ()


def test_exports(star6):
    fd = decompose(star6, DecompConfig(1)).decomposition
    assert fd.to_text().splitlines()[:2] == ["0 2", "1 1 0@1"]
    assert fd.to_dict()["nodes"][1] == {"id": 1, "level": 1, "parents": [[0, 1]]}


def _independent_checks(g, fd, limit):
    assert sum(len(p) for p in fd.parents) == g.m
    assert fd.forests <= limit
    for i in range(1, fd.forests + 1):
        h = nx.Graph()
        h.add_nodes_from(range(g.n))
        h.add_edges_from(fd.forest_edges(i))
        assert nx.is_forest(h)
    orient = nx.DiGraph()
    orient.add_nodes_from(range(g.n))
    orient.add_edges_from((u, p) for u in range(g.n) for p in fd.parent_ids(u))
    assert nx.is_directed_acyclic_graph(orient)


@pytest.mark.parametrize("alpha", [1, 2, 3])
@pytest.mark.parametrize("n", [8, 50, 300])
def test_forest_union_decompositions(n, alpha):
    g, cert = generate(GraphSpec("forest-union", n=n, alpha=alpha, seed=n + alpha))
    run = decompose(g, DecompConfig(alpha))
    fd = run.decomposition
    assert check_decomposition(g, fd) == []
    _independent_checks(g, fd, 3 * alpha)
    assert fd.num_levels <= DecompConfig(alpha).level_cap(n)
    assert run.peel_trace.rounds_executed == fd.num_levels
    assert run.orient_trace.rounds_executed == 2


def test_subdivided_clique_alpha_two():
    for k in range(4, 9):
        g, _ = generate(GraphSpec("subdivided-clique", k=k))
        fd = decompose(g, DecompConfig(2)).decomposition
        assert check_decomposition(g, fd) == []
        assert fd.forests <= 6


def test_check_decomposition_detects_damage(star6):
    fd = decompose(star6, DecompConfig(1)).decomposition
    broken = type(fd)(fd.n, fd.levels, fd.parents[:1] + ((),) + fd.parents[2:], fd.children, fd.threshold)
    assert any("partition" in p for p in check_decomposition(star6, broken))


@given(n=st.integers(2, 60), alpha=st.integers(1, 4), seed=st.integers(0, 10**6), eps=st.sampled_from(["1", "1/2", "2"]))
@settings(max_examples=60, deadline=None)
def test_decomposition_invariants_property(n, alpha, seed, eps):
    g, _ = generate(GraphSpec("forest-union", n=n, alpha=alpha, seed=seed))
    cfg = DecompConfig(alpha, eps)
    fd = decompose(g, cfg).decomposition
    assert check_decomposition(g, fd) == []
    assert fd.forests <= cfg.threshold
    assert max(len(p) for p in fd.parents) <= cfg.threshold
