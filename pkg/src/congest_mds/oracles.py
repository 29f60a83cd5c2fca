"""Exact sequential references for small inputs.

``exact_mds`` and ``exact_setcover`` use bitmask branch and bound; both refuse
inputs larger than the configured budget instead of running indefinitely.
"""
from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

from .forest_decomp import ForestDecomposition
from .graph_model import Graph

CACHE_ENV = "CONGEST_MDS_CACHE"


class OracleRefused(ValueError):
    """Input exceeds the oracle budget."""


class OracleTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_mds_nodes: int = 22
    max_universe: int = 22
    time_cap: float = 60.0


DEFAULT_BUDGET = OracleBudget()


class _Clock:
    def __init__(self, cap: float):
        self.deadline = time.monotonic() + cap
        self.ticks = 0

    def tick(self):
        self.ticks += 1
        if self.ticks & 0x3FF == 0 and time.monotonic() > self.deadline:
            raise OracleTimeout("oracle time cap exceeded")


def _min_cover_size(masks: list[int], full: int, clock: _Clock, upper: int) -> int:
    """Fewest masks whose OR is ``full``; ``upper`` is a known feasible size."""
    # for every element, the masks containing it
    bits = full.bit_length()
    holders = [[m for m in masks if m >> b & 1] for b in range(bits)]
    widest = max((bin(m).count("1") for m in masks), default=1)
    best = upper

    def search(covered: int, used: int):
        nonlocal best
        clock.tick()
        if covered == full:
            best = min(best, used)
            return
        missing = full & ~covered
        # lower bound: each further mask covers at most `widest` new elements
        if used + -(-bin(missing).count("1") // widest) >= best:
            return
        # branch on the uncovered element with fewest holders
        b = min((i for i in range(bits) if missing >> i & 1), key=lambda i: len(holders[i]))
        for m in sorted(holders[b], key=lambda m: -bin(m & missing).count("1")):
            search(covered | m, used + 1)

    search(0, 0)
    return best


def _closed_masks(g: Graph) -> list[int]:
    masks = []
    for u in range(g.n):
        m = 1 << u
        for v in g.adjacency[u]:
            m |= 1 << v
        masks.append(m)
    return masks


def exact_mds(g: Graph, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[int, ...]:
    """Lexicographically smallest minimum dominating set."""
    if g.n > budget.max_mds_nodes:
        raise OracleRefused(f"exact_mds refuses n={g.n} > {budget.max_mds_nodes}")
    if g.n == 0:
        return ()
    clock = _Clock(budget.time_cap)
    masks = _closed_masks(g)
    full = (1 << g.n) - 1
    k = _min_cover_size(masks, full, clock, upper=g.n)
    # vertices whose closed neighbourhood has all indices <= i must be
    # dominated once vertices 0..i are decided
    closing: list[list[int]] = [[] for _ in range(g.n)]
    for u in range(g.n):
        closing[max(masks[u].bit_length() - 1, u)].append(u)

    chosen: list[int] = []

    def search(i: int, dominated: int) -> bool:
        clock.tick()
        if len(chosen) == k:
            return dominated == full
        if i == g.n or g.n - i < k - len(chosen):
            return False
        for take in (True, False):
            dom = dominated | masks[i] if take else dominated
            if all(dom >> u & 1 for u in closing[i]):
                if take:
                    chosen.append(i)
                if search(i + 1, dom):
                    return True
                if take:
                    chosen.pop()
        return False

    found = search(0, 0)
    assert found, "search must find a set of the optimal size"
    return tuple(chosen)


def exact_setcover(
    sets: Mapping[Hashable, Iterable],
    universe: Iterable | None = None,
    budget: OracleBudget = DEFAULT_BUDGET,
) -> int:
    sets = {s: tuple(m) for s, m in sets.items()}
    elems = sorted(set(universe) if universe is not None else {e for m in sets.values() for e in m})
    if len(elems) > budget.max_universe:
        raise OracleRefused(f"exact_setcover refuses universe of {len(elems)} > {budget.max_universe}")
    index = {e: i for i, e in enumerate(elems)}
    masks = []
    for members in sets.values():
        m = 0
        for e in members:
            if e in index:
                m |= 1 << index[e]
        if m:
            masks.append(m)
    full = (1 << len(elems)) - 1
    reach = 0
    for m in masks:
        reach |= m
    if reach != full:
        missing = [e for e in elems if not reach >> index[e] & 1]
        raise ValueError(f"infeasible set system: element {missing[0]!r} lies in no set")
    if not elems:
        return 0
    return _min_cover_size(sorted(set(masks)), full, _Clock(budget.time_cap), upper=len(elems))


def is_dominating(g: Graph, nodes: Iterable[int]) -> bool:
    chosen = set(nodes)
    for v in chosen:
        if not (isinstance(v, int) and 0 <= v < g.n):
            raise ValueError(f"unknown node id {v!r}")
    return all(u in chosen or any(v in chosen for v in g.adjacency[u]) for u in range(g.n))


def is_cover(sets: Mapping[Hashable, Sequence], chosen: Iterable, universe: Iterable | None = None) -> bool:
    chosen = list(chosen)
    for s in chosen:
        if s not in sets:
            raise ValueError(f"unknown set {s!r}")
    need = set(universe) if universe is not None else {e for m in sets.values() for e in m}
    got = set()
    for s in chosen:
        got.update(sets[s])
    return need <= got


@dataclass
class ExistenceCheck:
    passed: bool
    witness: tuple[int, ...]
    mds_size: int
    bound: int
    uncovered: tuple[int, ...] = ()


def existence_bound_check(
    g: Graph, fd: ForestDecomposition, mds: Sequence[int], budget: OracleBudget = DEFAULT_BUDGET
) -> ExistenceCheck:
    """Build D = M + parents(M) and check that its sets cover V with |D| <= (f+1)|M|."""
    if g.n > budget.max_mds_nodes:
        raise OracleRefused(f"existence check refuses n={g.n} > {budget.max_mds_nodes}")
    d = set(mds)
    for u in mds:
        d.update(fd.parent_ids(u))
    covered = set()
    for v in d:
        covered.add(v)
        covered.update(fd.child_ids(v))
    uncovered = tuple(sorted(set(range(g.n)) - covered))
    bound = (fd.forests + 1) * len(mds)
    return ExistenceCheck(not uncovered and len(d) <= bound, tuple(sorted(d)), len(mds), bound, uncovered)


def _cache_dir(cache_dir: str | os.PathLike | None) -> Path | None:
    path = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV)
    return Path(path) if path else None


def cached_exact_mds(g: Graph, cache_dir: str | os.PathLike | None = None, budget: OracleBudget = DEFAULT_BUDGET):
    """``exact_mds`` memoised on disk by graph digest (directory from argument or $CONGEST_MDS_CACHE)."""
    root = _cache_dir(cache_dir)
    if root is None:
        return exact_mds(g, budget)
    path = root / f"mds-{g.digest()}.json"
    if path.exists():
        return tuple(json.loads(path.read_text())["mds"])
    result = exact_mds(g, budget)
    root.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"n": g.n, "m": g.m, "mds": list(result)}))
    return result


def greedy_mds(g: Graph) -> tuple[int, ...]:
    """Classic greedy baseline (most newly dominated, ties to smaller ID); no guarantee is claimed."""
    masks = _closed_masks(g)
    full = (1 << g.n) - 1
    dominated = 0
    chosen = []
    while dominated != full:
        u = max(range(g.n), key=lambda v: (bin(masks[v] & ~dominated).count("1"), -v))
        chosen.append(u)
        dominated |= masks[u]
    return tuple(sorted(chosen))
