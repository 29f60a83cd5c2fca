"""Forest decomposition by level peeling (H-partition) on the CONGEST engine.

Stage 1 peels nodes whose residual degree is at most ``t = ceil((2+eps)*alpha)``,
one level per round.  Stage 2 orients every edge toward the endpoint with the
larger ``(level, id)`` key; each node then numbers its parent edges 1..p in
increasing parent-ID order and tells each parent the forest index chosen.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from . import congest_sim
from .congest_sim import Message, NodeContext, NodeProgram, Step
from .graph_model import Graph, is_acyclic


class PromiseViolation(congest_sim.EngineError):
    """The graph does not satisfy the declared arboricity bound."""

    def __init__(self, node: int, alpha: int, level_cap: int):
        super().__init__(
            f"arboricity promise violated: node {node} still unleveled after {level_cap} "
            f"peeling iterations (declared alpha={alpha})"
        )
        self.node = node
        self.alpha = alpha
        self.level_cap = level_cap


@dataclass(frozen=True)
class DecompConfig:
    alpha: int
    epsilon: Fraction = Fraction(1)
    threshold_override: int | None = None

    def __post_init__(self):
        if not isinstance(self.alpha, int) or self.alpha < 1:
            raise ValueError("alpha must be a positive integer")
        if Fraction(self.epsilon) <= 0:
            raise ValueError("epsilon must be positive")
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))

    @property
    def threshold(self) -> int:
        if self.threshold_override is not None:
            return self.threshold_override
        return math.ceil((2 + self.epsilon) * self.alpha)

    @property
    def effective_epsilon(self) -> Fraction:
        """Slack actually provided by the threshold, t/alpha - 2."""
        return Fraction(self.threshold, self.alpha) - 2

    def level_cap(self, n: int) -> int:
        eps = self.effective_epsilon
        if eps <= 0:
            raise ValueError(f"threshold {self.threshold} gives no peeling progress for alpha={self.alpha}")
        if n <= 1:
            return 1
        return math.ceil(math.log(n) / math.log((2 + eps) / 2)) + 1


@dataclass(frozen=True)
class ForestDecomposition:
    """Per-node levels and parent/child lists; records are ``(node id, forest index)``."""

    n: int
    levels: tuple[int, ...]
    parents: tuple[tuple[tuple[int, int], ...], ...]
    children: tuple[tuple[tuple[int, int], ...], ...]
    threshold: int

    @property
    def forests(self) -> int:
        return max((idx for ps in self.parents for _, idx in ps), default=0)

    @property
    def num_levels(self) -> int:
        return max(self.levels, default=0)

    def parent_ids(self, u: int) -> tuple[int, ...]:
        return tuple(p for p, _ in self.parents[u])

    def child_ids(self, u: int) -> tuple[int, ...]:
        return tuple(c for c, _ in self.children[u])

    def forest_edges(self, index: int) -> list[tuple[int, int]]:
        return [(u, p) for u in range(self.n) for p, i in self.parents[u] if i == index]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "threshold": self.threshold,
            "forests": self.forests,
            "nodes": [
                {"id": u, "level": self.levels[u], "parents": [list(r) for r in self.parents[u]]}
                for u in range(self.n)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_text(self) -> str:
        """One line per node: ``id level parent@index ...``."""
        lines = []
        for u in range(self.n):
            recs = " ".join(f"{p}@{i}" for p, i in self.parents[u])
            lines.append(f"{u} {self.levels[u]} {recs}".rstrip())
        return "\n".join(lines) + "\n"


class PeelProgram(NodeProgram):
    """Round r: an unleveled node with at most t unleveled neighbours takes
    level r, announces it with a 1-bit flag and halts."""

    name = "peel_levels"

    def init(self, ctx: NodeContext) -> Step:
        return Step(ctx.degree)

    def on_round(self, ctx, residual, inbox, rnd):
        residual -= len(inbox)
        if residual <= ctx.params["threshold"]:
            flag = Message.flag()
            return Step(residual, {p: flag for p in range(ctx.degree)}, True, rnd)
        if rnd >= ctx.params["level_cap"]:
            return Step(residual, {}, True, None)
        return Step(residual)


class OrientProgram(NodeProgram):
    """Three-step exchange: send own level; pick parents and send each its
    forest index; collect children."""

    name = "orient_and_assign"

    def init(self, ctx: NodeContext) -> Step:
        level = ctx.local_input
        if ctx.degree == 0:
            return Step(None, {}, True, ((), ()))
        msg = Message.pack([level], ctx.width)
        return Step(None, {p: msg for p in range(ctx.degree)})

    def on_round(self, ctx, state, inbox, rnd):
        if rnd == 1:
            mine = (ctx.local_input, ctx.node_id)
            parent_ports = [
                p for p in range(ctx.degree) if (inbox[p].unpack(ctx.width)[0], ctx.neighbors[p]) > mine
            ]
            # ports are sorted by neighbour ID, so indices follow parent-ID order
            parents = tuple((ctx.neighbors[p], i) for i, p in enumerate(parent_ports, start=1))
            out = {p: Message.pack([i], ctx.width) for i, p in enumerate(parent_ports, start=1)}
            return Step(parents, out)
        children = tuple((ctx.neighbors[p], msg.unpack(ctx.width)[0]) for p, msg in sorted(inbox.items()))
        return Step(state, {}, True, (state, children))


@dataclass
class DecompRun:
    decomposition: ForestDecomposition
    peel_trace: congest_sim.RoundTrace
    orient_trace: congest_sim.RoundTrace

    @property
    def rounds(self) -> int:
        return self.peel_trace.rounds_executed + self.orient_trace.rounds_executed


def peel_levels(
    g: Graph, cfg: DecompConfig, *, round_cap: int = 100_000, bandwidth: int = congest_sim.DEFAULT_BANDWIDTH
) -> tuple[list[int], congest_sim.RoundTrace]:
    cap = cfg.level_cap(g.n)
    params = {"alpha": cfg.alpha, "threshold": cfg.threshold, "level_cap": cap}
    outputs, trace = congest_sim.run(g, PeelProgram(), round_cap, bandwidth=bandwidth, params=params)
    for u, level in enumerate(outputs):
        if level is None:
            raise PromiseViolation(u, cfg.alpha, cap)
    return outputs, trace


def orient_and_assign(
    g: Graph,
    levels,
    threshold: int,
    *,
    round_cap: int = 100_000,
    bandwidth: int = congest_sim.DEFAULT_BANDWIDTH,
) -> tuple[ForestDecomposition, congest_sim.RoundTrace]:
    outputs, trace = congest_sim.run(
        g, OrientProgram(), round_cap, bandwidth=bandwidth, local_inputs=list(levels)
    )
    fd = ForestDecomposition(
        g.n,
        tuple(levels),
        tuple(o[0] for o in outputs),
        tuple(o[1] for o in outputs),
        threshold,
    )
    return fd, trace


def decompose(
    g: Graph, cfg: DecompConfig, *, round_cap: int = 100_000, bandwidth: int = congest_sim.DEFAULT_BANDWIDTH
) -> DecompRun:
    levels, peel_trace = peel_levels(g, cfg, round_cap=round_cap, bandwidth=bandwidth)
    fd, orient_trace = orient_and_assign(g, levels, cfg.threshold, round_cap=round_cap, bandwidth=bandwidth)
    return DecompRun(fd, peel_trace, orient_trace)


def check_decomposition(g: Graph, fd: ForestDecomposition) -> list[str]:
    """Return a list of violated decomposition invariants (empty when valid)."""
    problems = []
    seen = set()
    for u in range(g.n):
        idxs = [i for _, i in fd.parents[u]]
        if len(set(idxs)) != len(idxs):
            problems.append(f"node {u} has two parents in one forest")
        if len(idxs) > fd.threshold:
            problems.append(f"node {u} has {len(idxs)} parents > threshold {fd.threshold}")
        for p, _ in fd.parents[u]:
            if (fd.levels[p], p) <= (fd.levels[u], u):
                problems.append(f"edge {u}->{p} does not increase (level, id)")
            e = (min(u, p), max(u, p))
            if e in seen:
                problems.append(f"edge {e} recorded twice")
            seen.add(e)
        for c, i in fd.children[u]:
            if (u, i) not in fd.parents[c]:
                problems.append(f"child record {c}@{i} at {u} has no matching parent record")
    if seen != set(g.edges):
        problems.append("parent records do not partition the edge set")
    for i in range(1, fd.forests + 1):
        if not is_acyclic(g.n, fd.forest_edges(i)):
            problems.append(f"forest {i} contains a cycle")
    return problems

