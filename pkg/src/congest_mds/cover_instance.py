"""Bipartite set-cover instance built locally from a forest decomposition.

Node ``u`` represents the set ``{u} + children(u)``; element ``v`` lies in its
own set and in the sets of its parents.  Every node already knows both lists
after the decomposition, so building the instance costs no rounds.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

from .forest_decomp import ForestDecomposition


@dataclass(frozen=True)
class CoverInstance:
    n: int
    sets: tuple[tuple[int, ...], ...]
    containing: tuple[tuple[int, ...], ...]

    @property
    def frequency(self) -> int:
        return max((len(c) for c in self.containing), default=0)

    @property
    def max_set_size(self) -> int:
        return max((len(s) for s in self.sets), default=0)

    def as_set_system(self) -> dict[int, tuple[int, ...]]:
        return {u: members for u, members in enumerate(self.sets)}

    def local_view(self, u: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Members of ``S_u`` and representatives of the sets containing ``u``."""
        return self.sets[u], self.containing[u]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "frequency": self.frequency,
            "max_set_size": self.max_set_size,
            "sets": [{"representative": u, "members": list(s)} for u, s in enumerate(self.sets)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def build(fd: ForestDecomposition) -> CoverInstance:
    sets = tuple(tuple(sorted((u, *fd.child_ids(u)))) for u in range(fd.n))
    containing = tuple(tuple(sorted((v, *fd.parent_ids(v)))) for v in range(fd.n))
    return CoverInstance(fd.n, sets, containing)


def check_instance(inst: CoverInstance, fd: ForestDecomposition) -> list[str]:
    problems = []
    for u, members in enumerate(inst.sets):
        if u not in members:
            problems.append(f"node {u} missing from its own set")
        for v in members:
            if u not in inst.containing[v]:
                problems.append(f"incidence asymmetric: {v} in S_{u} but S_{u} not listed at {v}")
    for v, reps in enumerate(inst.containing):
        if len(reps) != 1 + len(fd.parents[v]):
            problems.append(f"element {v} lies in {len(reps)} sets, expected {1 + len(fd.parents[v])}")
        for u in reps:
            if v not in inst.sets[u]:
                problems.append(f"incidence asymmetric: S_{u} listed at {v} but {v} not a member")
    if inst.frequency > fd.forests + 1:
        problems.append(f"frequency {inst.frequency} exceeds forests + 1 = {fd.forests + 1}")
    return problems


def set_system_from_json(data: Mapping) -> dict[int, tuple[int, ...]]:
    return {int(s["representative"]): tuple(s["members"]) for s in data["sets"]}
