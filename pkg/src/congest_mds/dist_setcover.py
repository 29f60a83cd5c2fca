"""Deterministic primal-dual set cover for bounded-frequency instances.

Phase ``k``: every uncovered element ``e`` carries the dual ``mu**k / D_e``,
where ``D_e`` is the largest size of a set containing ``e``.  A set joins the
cover in the first phase in which the duals of its members (frozen values for
members covered earlier) sum to at least 1; all members of joined sets freeze.

Guarantees, checked by :func:`check_result` on every run:

* ``sum_{e in S} y_e <= mu`` for every set ``S`` (so ``y / mu`` is dual feasible)
* ``|cover| <= sum_{S in cover} sum_{e in S} y_e <= f * sum_e y_e``
* hence ``|cover| <= mu * f * OPT``, with at most ``ceil(log_mu D) + 1`` phases.

Two implementations share these semantics: :func:`primal_dual` works on any
set system in one process, :func:`solve` runs on the CONGEST engine over the
graph in which a cover instance is embedded, exchanging only set sizes once and
1-bit flags afterwards.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from . import congest_sim
from .congest_sim import Message, NodeContext, NodeProgram, Step
from .cover_instance import CoverInstance
from .graph_model import Graph


class InfeasibleInstance(ValueError):
    pass


@dataclass
class CoverResult:
    chosen: tuple
    phases: int
    duals: dict = field(repr=False)
    cover_phase: dict = field(repr=False)
    join_phase: dict = field(repr=False)
    rounds: int = 0
    snapshots: list = field(default_factory=list, repr=False)

    @property
    def size(self) -> int:
        return len(self.chosen)

    def to_dict(self) -> dict:
        return {
            "chosen": list(self.chosen),
            "size": self.size,
            "phases": self.phases,
            "rounds": self.rounds,
            "duals": {str(e): str(y) for e, y in sorted(self.duals.items())},
            "snapshots": [
                {
                    "phase": snap["phase"],
                    "covered": sorted(map(str, snap["covered"])),
                    "duals": {str(e): str(y) for e, y in sorted(snap["duals"].items())},
                }
                for snap in self.snapshots
            ],
        }


def phase_bound(max_set_size: int, mu) -> int:
    """ceil(log_mu D) + 1, computed exactly."""
    mu = Fraction(mu)
    k, power = 0, Fraction(1)
    while power < max_set_size:
        power *= mu
        k += 1
    return k + 1


def _containing(sets: Mapping[Hashable, Sequence]) -> dict:
    containing: dict = {}
    for s, members in sets.items():
        for e in members:
            containing.setdefault(e, []).append(s)
    return containing


def primal_dual(sets: Mapping[Hashable, Sequence], mu=2, universe: Sequence | None = None) -> CoverResult:
    """Sequential reference run; records a dual snapshot after every phase."""
    mu = Fraction(mu)
    if mu <= 1:
        raise ValueError("multiplier mu must exceed 1")
    containing = _containing(sets)
    elements = sorted(set(universe) if universe is not None else set(containing))
    for e in elements:
        if not containing.get(e):
            raise InfeasibleInstance(f"element {e!r} lies in no set")
    delta = {e: max(len(sets[s]) for s in containing[e]) for e in elements}
    cover_phase: dict = {}
    join_phase: dict = {}
    frozen: dict = {}
    snapshots = []
    k = 0
    while len(cover_phase) < len(elements):
        scale = mu**k
        y = {e: frozen[e] if e in frozen else scale / delta[e] for e in elements}
        joining = [s for s in sets if s not in join_phase and sets[s] and sum(y[e] for e in sets[s]) >= 1]
        for s in joining:
            join_phase[s] = k
            for e in sets[s]:
                if e not in cover_phase:
                    cover_phase[e] = k
                    frozen[e] = y[e]
        snapshots.append({"phase": k, "covered": frozenset(cover_phase), "duals": dict(y)})
        k += 1
    return CoverResult(
        chosen=tuple(sorted(join_phase)),
        phases=k,
        duals=frozen,
        cover_phase=cover_phase,
        join_phase=join_phase,
        snapshots=snapshots,
    )


@dataclass
class _NodeState:
    size: int
    parent_ports: tuple[int, ...]
    child_ports: tuple[int, ...]
    delta: int = 0
    child_delta: dict = field(default_factory=dict)
    child_covered: set = field(default_factory=set)
    uncovered_inv: Fraction = Fraction(0)
    frozen: Fraction = Fraction(0)
    cover_phase: int | None = None
    join_phase: int | None = None


class SetCoverProgram(NodeProgram):
    """Node program for an instance embedded in G.

    Round 1 (setup): sizes of parents' sets arrive, D_v is sent up.
    Round 2: children's D arrive.  Then phase k uses rounds 2k+2 (sets decide
    and flag their members) and 2k+3 (newly covered elements flag parents).
    """

    name = "dist_setcover"

    def init(self, ctx: NodeContext) -> Step:
        parent_ids, child_ids = ctx.local_input
        ports = lambda ids: tuple(bisect_left(ctx.neighbors, v) for v in ids)  # noqa: E731
        st = _NodeState(1 + len(child_ids), ports(parent_ids), ports(child_ids))
        msg = Message.pack([st.size], ctx.width)
        return Step(st, {p: msg for p in st.child_ports})

    def on_round(self, ctx, st: _NodeState, inbox, rnd):
        mu = ctx.params["mu"]
        w = ctx.width
        if rnd == 1:
            st.delta = max([st.size] + [inbox[p].unpack(w)[0] for p in st.parent_ports])
            msg = Message.pack([st.delta], w)
            return Step(st, {p: msg for p in st.parent_ports})
        if rnd == 2:
            st.child_delta = {p: inbox[p].unpack(w)[0] for p in st.child_ports}
            st.uncovered_inv = Fraction(1, st.delta) + sum((Fraction(1, d) for d in st.child_delta.values()), Fraction(0))
        if rnd % 2 == 0:
            k = (rnd - 2) // 2
            for p in inbox if rnd > 2 else ():
                st.child_covered.add(p)
                st.uncovered_inv -= Fraction(1, st.child_delta[p])
                st.frozen += mu ** (k - 1) / st.child_delta[p]
            if self._finished(st):
                return self._halt(st)
            if st.join_phase is None and mu**k * st.uncovered_inv + st.frozen >= 1:
                st.join_phase = k
                flag = Message.flag()
                return Step(st, {p: flag for p in st.child_ports if p not in st.child_covered})
            return Step(st)
        k = (rnd - 3) // 2
        out = {}
        if st.cover_phase is None and (inbox or st.join_phase == k):
            st.cover_phase = k
            st.uncovered_inv -= Fraction(1, st.delta)
            st.frozen += mu**k / st.delta
            flag = Message.flag()
            out = {p: flag for p in st.parent_ports}
        if self._finished(st):
            return self._halt(st, out)
        return Step(st, out)

    @staticmethod
    def _finished(st: _NodeState) -> bool:
        return st.cover_phase is not None and (
            st.join_phase is not None or len(st.child_covered) == len(st.child_ports)
        )

    @staticmethod
    def _halt(st: _NodeState, out=None) -> Step:
        return Step(st, out or {}, True, (st.join_phase, st.cover_phase, st.delta))


def solve(
    g: Graph,
    inst: CoverInstance,
    mu=2,
    *,
    round_cap: int = 100_000,
    bandwidth: int = congest_sim.DEFAULT_BANDWIDTH,
) -> tuple[CoverResult, congest_sim.RoundTrace]:
    """Run the set-cover node program over ``g`` for an instance built from a
    decomposition of ``g``: parents of ``v`` are ``containing[v]`` minus ``v``."""
    mu = Fraction(mu)
    if mu <= 1:
        raise ValueError("multiplier mu must exceed 1")
    for v in range(inst.n):
        if not inst.containing[v]:
            raise InfeasibleInstance(f"element {v} lies in no set")
    local = [
        (tuple(p for p in inst.containing[v] if p != v), tuple(c for c in inst.sets[v] if c != v))
        for v in range(inst.n)
    ]
    outputs, trace = congest_sim.run(
        g, SetCoverProgram(), round_cap, bandwidth=bandwidth, params={"mu": mu}, local_inputs=local
    )
    join_phase = {v: o[0] for v, o in enumerate(outputs) if o[0] is not None}
    cover_phase = {v: o[1] for v, o in enumerate(outputs)}
    duals = {v: mu ** o[1] / o[2] for v, o in enumerate(outputs)}
    result = CoverResult(
        chosen=tuple(sorted(join_phase)),
        phases=1 + max(cover_phase.values(), default=-1),
        duals=duals,
        cover_phase=cover_phase,
        join_phase=join_phase,
        rounds=trace.rounds_executed,
    )
    return result, trace


def check_result(sets: Mapping[Hashable, Sequence], result: CoverResult, mu=2, opt: int | None = None) -> list[str]:
    """Audit the cover and the dual inequality chain exactly; returns violations."""
    mu = Fraction(mu)
    problems = []
    containing = _containing(sets)
    covered = {e for s in result.chosen for e in sets[s]}
    missing = set(containing) - covered
    if missing:
        problems.append(f"{len(missing)} elements uncovered, e.g. {min(missing)!r}")
    y = result.duals
    for s, members in sets.items():
        load = sum((y[e] for e in members), Fraction(0))
        if load > mu:
            problems.append(f"set {s!r}: dual load {load} exceeds mu={mu}")
    freq = max((len(c) for c in containing.values()), default=0)
    charged = sum((y[e] for s in result.chosen for e in sets[s]), Fraction(0))
    total = sum(y.values(), Fraction(0))
    if not result.size <= charged:
        problems.append(f"cover size {result.size} > charged duals {charged}")
    if not charged <= freq * total:
        problems.append(f"charged duals {charged} > f * sum y = {freq * total}")
    dmax = max((len(m) for m in sets.values()), default=0)
    if result.phases > phase_bound(dmax, mu):
        problems.append(f"{result.phases} phases exceed bound {phase_bound(dmax, mu)}")
    if opt is not None:
        if total > mu * opt:
            problems.append(f"sum y = {total} > mu * OPT = {mu * opt}")
        if result.size > mu * freq * opt:
            problems.append(f"cover size {result.size} > mu * f * OPT = {mu * freq * opt}")
    return problems
