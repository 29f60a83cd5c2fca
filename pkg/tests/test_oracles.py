from itertools import combinations

import pytest

from congest_mds import oracles
from congest_mds.cover_instance import build
from congest_mds.forest_decomp import DecompConfig, decompose
from congest_mds.graph_model import Graph, GraphSpec, fixture_specs, generate

from conftest import brute_mds_size, brute_setcover_size


def test_exact_mds_examples(k5):
    assert oracles.exact_mds(k5) == (0,)
    c4 = generate(GraphSpec("cycle", n=4))[0]
    assert len(oracles.exact_mds(c4)) == 2
    p7 = generate(GraphSpec("path", n=7))[0]
    assert len(oracles.exact_mds(p7)) == 3
    assert oracles.is_dominating(p7, oracles.exact_mds(p7))


def test_lexicographically_smallest():
    p7 = generate(GraphSpec("path", n=7))[0]
    best = min(c for c in combinations(range(7), 3) if oracles.is_dominating(p7, c))
    assert oracles.exact_mds(p7) == best == (0, 2, 5)


@pytest.mark.parametrize("spec", fixture_specs(60)[:60:4], ids=lambda s: s.label())
def test_exact_mds_matches_enumeration(spec):
    g, _ = generate(spec)
    mds = oracles.exact_mds(g)
    assert oracles.is_dominating(g, mds)
    assert len(mds) == brute_mds_size(g)


def test_refuses_over_budget():
    g = generate(GraphSpec("path", n=23))[0]
    with pytest.raises(oracles.OracleRefused):
        oracles.exact_mds(g)
    with pytest.raises(oracles.OracleRefused):
        oracles.exact_setcover({0: range(30)})


def test_exact_setcover_examples(star6):
    assert oracles.exact_setcover({"S1": ["e1", "e2"], "S2": ["e1"]}) == 1
    assert oracles.exact_setcover({i: [i] for i in range(7)}) == 7
    inst = build(decompose(star6, DecompConfig(1)).decomposition)
    assert oracles.exact_setcover(inst.as_set_system()) == 1
    with pytest.raises(ValueError, match="infeasible"):
        oracles.exact_setcover({"A": [1]}, universe=[1, 2])


@pytest.mark.parametrize("seed", range(12))
def test_exact_setcover_matches_enumeration(seed):
    import random

    rng = random.Random(seed)
    sets = {i: rng.sample(range(12), rng.randint(1, 5)) for i in range(rng.randint(3, 10))}
    assert oracles.exact_setcover(sets) == brute_setcover_size(sets)


def test_is_dominating_and_cover(k5):
    c4 = generate(GraphSpec("cycle", n=4))[0]
    assert all(oracles.is_dominating(k5, [v]) for v in range(5))
    assert not oracles.is_dominating(c4, [0])
    with pytest.raises(ValueError):
        oracles.is_dominating(c4, [7])
    assert oracles.is_cover({"a": [1, 2], "b": [3]}, ["a", "b"])
    assert not oracles.is_cover({"a": [1, 2], "b": [3]}, ["a"])
    with pytest.raises(ValueError):
        oracles.is_cover({"a": [1]}, ["z"])


def test_existence_check_star(star6):
    fd = decompose(star6, DecompConfig(1)).decomposition
    ex = oracles.existence_bound_check(star6, fd, (0,))
    assert ex.passed and ex.witness == (0,) and ex.bound == 2


def test_existence_check_edgeless(edgeless):
    fd = decompose(edgeless, DecompConfig(1)).decomposition
    mds = oracles.exact_mds(edgeless)
    ex = oracles.existence_bound_check(edgeless, fd, mds)
    assert ex.passed and ex.witness == mds == tuple(range(5))


def test_existence_check_fails_for_non_dominating(edgeless):
    fd = decompose(edgeless, DecompConfig(1)).decomposition
    ex = oracles.existence_bound_check(edgeless, fd, (1,))
    assert not ex.passed and ex.uncovered == (0, 2, 3, 4)


def test_disk_cache(tmp_path, monkeypatch):
    g = generate(GraphSpec("forest-union", n=15, alpha=2, seed=3))[0]
    first = oracles.cached_exact_mds(g, tmp_path)
    assert len(list(tmp_path.iterdir())) == 1
    assert oracles.cached_exact_mds(g, tmp_path) == first
    monkeypatch.setenv(oracles.CACHE_ENV, str(tmp_path / "env"))
    assert oracles.cached_exact_mds(g) == first
    assert (tmp_path / "env").is_dir()


def test_greedy_is_dominating():
    g = generate(GraphSpec("forest-union", n=80, alpha=2, seed=1))[0]
    assert oracles.is_dominating(g, oracles.greedy_mds(g))


def test_time_cap():
    g = generate(GraphSpec("forest-union", n=22, alpha=1, seed=9))[0]
    with pytest.raises(oracles.OracleTimeout):
        oracles.exact_mds(g, oracles.OracleBudget(time_cap=-1.0))


def test_empty_graph():
    assert oracles.exact_mds(Graph.from_edges(0, [])) == ()
