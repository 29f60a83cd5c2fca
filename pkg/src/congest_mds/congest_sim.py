"""Deterministic synchronous CONGEST round engine.

A node program is evaluated at every node.  ``init`` runs before the first
round and may already queue messages; messages queued by a node at the end
of round ``t`` (``init`` counts as round 0) are in the receiver's inbox when
round ``t + 1`` is evaluated.  Nodes address neighbours by port index, ports
being sorted by neighbour ID.

Every message is checked against the per-edge bandwidth
``B * ceil(log2(n + 1))`` bits at the moment it is queued.
"""
from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Any, Mapping, NamedTuple, Sequence

from .graph_model import Graph

DEFAULT_BANDWIDTH = 4


def id_width(n: int) -> int:
    """Bits needed for one ID-sized field, ceil(log2(n + 1))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return n.bit_length()


def budget(n: int, bandwidth: int = DEFAULT_BANDWIDTH) -> int:
    return bandwidth * id_width(n)


@dataclass(frozen=True)
class Message:
    payload: int
    bit_length: int

    def __post_init__(self):
        if self.bit_length < 0 or self.payload < 0 or self.payload >> self.bit_length:
            raise ValueError(f"payload {self.payload} does not fit in {self.bit_length} bits")

    @classmethod
    def flag(cls, value: bool = True) -> "Message":
        return cls(int(value), 1)

    @classmethod
    def pack(cls, values: Sequence[int], width: int) -> "Message":
        payload = 0
        for v in values:
            if v < 0 or v >> width:
                raise ValueError(f"field {v} does not fit in {width} bits")
            payload = (payload << width) | v
        return cls(payload, width * len(values))

    def unpack(self, width: int) -> tuple[int, ...]:
        count = self.bit_length // width
        mask = (1 << width) - 1
        return tuple((self.payload >> (width * (count - 1 - i))) & mask for i in range(count))

    def bits(self) -> str:
        return format(self.payload, f"0{self.bit_length}b") if self.bit_length else ""


@dataclass(frozen=True)
class NodeContext:
    """What a node knows before the first round: its ID, its ports, n, the
    shared configuration constants and its private input from earlier stages."""

    node_id: int
    neighbors: tuple[int, ...]
    n: int
    params: Mapping[str, Any]
    local_input: Any = None

    @property
    def degree(self) -> int:
        return len(self.neighbors)

    @property
    def width(self) -> int:
        return id_width(self.n)


class Step(NamedTuple):
    state: Any
    outbox: Mapping[int, Message] = {}
    halted: bool = False
    output: Any = None


class NodeProgram:
    """Base class for node programs.

    Subclasses implement ``init`` and ``on_round``; both must depend only on
    their arguments.  ``inbox`` maps port index to the message received on it.
    """

    name = "program"

    def init(self, ctx: NodeContext) -> Step:
        raise NotImplementedError

    def on_round(self, ctx: NodeContext, state: Any, inbox: Mapping[int, Message], rnd: int) -> Step:
        raise NotImplementedError


@dataclass
class RoundStats:
    round: int
    messages: int
    bits: int
    max_bits: int


@dataclass
class RoundTrace:
    program: str
    n: int
    budget: int
    rounds_executed: int = 0
    rounds: list[RoundStats] = field(default_factory=list)
    outputs: list[Any] = field(default_factory=list)
    halted_at: list[int | None] = field(default_factory=list)
    discarded: int = 0

    @property
    def max_bits(self) -> int:
        return max((r.max_bits for r in self.rounds), default=0)

    @property
    def total_messages(self) -> int:
        return sum(r.messages for r in self.rounds)

    def to_dict(self) -> dict:
        return {
            "program": self.program,
            "n": self.n,
            "budget": self.budget,
            "rounds_executed": self.rounds_executed,
            "max_bits": self.max_bits,
            "total_messages": self.total_messages,
            "discarded": self.discarded,
            "rounds": [[r.round, r.messages, r.bits, r.max_bits] for r in self.rounds],
            "outputs": [_jsonable(o) for o in self.outputs],
            "halted_at": self.halted_at,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


class EngineError(RuntimeError):
    stage: str | None = None


class BandwidthViolation(EngineError):
    def __init__(self, rnd: int, edge: tuple[int, int], bit_length: int, limit: int):
        super().__init__(
            f"round {rnd}: message on edge {edge[0]}->{edge[1]} has {bit_length} bits, budget is {limit}"
        )
        self.round = rnd
        self.edge = edge
        self.bit_length = bit_length
        self.limit = limit


class RoundCapExceeded(EngineError):
    def __init__(self, cap: int, unhalted: list[int], trace: RoundTrace):
        super().__init__(f"round cap {cap} reached with {len(unhalted)} unhalted nodes (first: {unhalted[0]})")
        self.cap = cap
        self.unhalted = unhalted
        self.trace = trace


class Simulation:
    """Step-by-step execution; ``run`` is the usual entry point."""

    def __init__(
        self,
        g: Graph,
        program: NodeProgram,
        *,
        bandwidth: int = DEFAULT_BANDWIDTH,
        params: Mapping[str, Any] | None = None,
        local_inputs: Sequence[Any] | None = None,
    ):
        self.g = g
        self.program = program
        self.limit = budget(max(g.n, 1), bandwidth)
        params = dict(params or {})
        self.contexts = [
            NodeContext(u, g.adjacency[u], g.n, params, None if local_inputs is None else local_inputs[u])
            for u in range(g.n)
        ]
        # reverse port lookup: port_back[u][i] is u's port index at neighbour adjacency[u][i]
        self._port_back = [
            tuple(bisect_left(g.adjacency[v], u) for v in g.adjacency[u]) for u in range(g.n)
        ]
        self.trace = RoundTrace(program.name, g.n, self.limit)
        self.round = 0
        self.states: list[Any] = []
        self.halted = [False] * g.n
        self.outputs: list[Any] = [None] * g.n
        self.halted_at: list[int | None] = [None] * g.n
        self.pending: list[Mapping[int, Message]] = []
        for ctx in self.contexts:
            self._apply(ctx.node_id, program.init(ctx))

    def _apply(self, u: int, step: Step) -> None:
        outbox = dict(step.outbox)
        for port, msg in outbox.items():
            if not 0 <= port < len(self.g.adjacency[u]):
                raise ValueError(f"node {u} sent on nonexistent port {port}")
            if msg.bit_length > self.limit:
                raise BandwidthViolation(self.round + 1, (u, self.g.adjacency[u][port]), msg.bit_length, self.limit)
        if len(self.states) <= u:
            self.states.append(step.state)
            self.pending.append(outbox)
        else:
            self.states[u] = step.state
            self.pending[u] = outbox
        if step.halted:
            self.halted[u] = True
            self.outputs[u] = step.output
            self.halted_at[u] = self.round

    @property
    def done(self) -> bool:
        return all(self.halted)

    def deliver(self) -> tuple[list[dict[int, Message]], RoundStats]:
        """Move queued messages into inboxes for the next round."""
        inboxes: list[dict[int, Message]] = [{} for _ in range(self.g.n)]
        count = bits = top = 0
        for u, outbox in enumerate(self.pending):
            for port, msg in outbox.items():
                count += 1
                bits += msg.bit_length
                top = max(top, msg.bit_length)
                inboxes[self.g.adjacency[u][port]][self._port_back[u][port]] = msg
        return inboxes, RoundStats(self.round + 1, count, bits, top)

    def step(self) -> RoundStats:
        inboxes, stats = self.deliver()
        self.round += 1
        for u in range(self.g.n):
            if self.halted[u]:
                self.trace.discarded += len(inboxes[u])
                self.pending[u] = {}
                continue
            self._apply(u, self.program.on_round(self.contexts[u], self.states[u], inboxes[u], self.round))
        self.trace.rounds.append(stats)
        self.trace.rounds_executed = self.round
        return stats

    def finish(self) -> RoundTrace:
        self.trace.discarded += sum(len(o) for o in self.pending)
        self.trace.outputs = list(self.outputs)
        self.trace.halted_at = list(self.halted_at)
        return self.trace


def run(
    g: Graph,
    program: NodeProgram,
    round_cap: int,
    *,
    bandwidth: int = DEFAULT_BANDWIDTH,
    params: Mapping[str, Any] | None = None,
    local_inputs: Sequence[Any] | None = None,
) -> tuple[list[Any], RoundTrace]:
    if round_cap <= 0:
        raise ValueError("round_cap must be positive")
    sim = Simulation(g, program, bandwidth=bandwidth, params=params, local_inputs=local_inputs)
    while not sim.done:
        if sim.round >= round_cap:
            trace = sim.finish()
            raise RoundCapExceeded(round_cap, [u for u in range(g.n) if not sim.halted[u]], trace)
        sim.step()
    trace = sim.finish()
    return list(sim.outputs), trace
