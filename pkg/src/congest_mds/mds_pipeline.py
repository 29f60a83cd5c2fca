"""Dominating set approximation: decomposition, cover instance, set cover.

The representatives of the chosen sets form the dominating set.  In ``fast``
mode the peeling threshold becomes ``max(ceil(sqrt(log2 n)), 2*alpha + 1)``,
trading approximation for fewer peeling levels.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import congest_sim, cover_instance, dist_setcover, forest_decomp
from .forest_decomp import DecompConfig, ForestDecomposition
from .graph_model import Graph

MODES = ("standard", "fast")


@dataclass(frozen=True)
class PipelineConfig:
    alpha: int
    epsilon: Fraction = Fraction(1)
    mu: Fraction = Fraction(2)
    mode: str = "standard"
    round_cap: int = 100_000
    bandwidth: int = congest_sim.DEFAULT_BANDWIDTH

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "mu", Fraction(self.mu))
        if self.mu <= 1:
            raise ValueError("mu must exceed 1")

    def decomp_config(self, n: int) -> DecompConfig:
        if self.mode == "fast":
            if n < 2:
                raise ValueError("fast mode needs n >= 2")
            return DecompConfig(self.alpha, self.epsilon, threshold_override=fast_threshold(n, self.alpha))
        return DecompConfig(self.alpha, self.epsilon)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "epsilon": str(self.epsilon),
            "mu": str(self.mu),
            "mode": self.mode,
            "round_cap": self.round_cap,
            "bandwidth": self.bandwidth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        for key in ("epsilon", "mu"):
            if key in d:
                d[key] = Fraction(str(d[key]))
        return cls(**d)


def fast_threshold(n: int, alpha: int) -> int:
    return max(math.ceil(math.sqrt(math.log2(n))), 2 * alpha + 1)


def certified_ratio_bound(alpha: int, epsilon=1, mu=2) -> Fraction:
    """mu * (t + 1)**2 with t = ceil((2+eps)*alpha).

    A cover of size at most (t+1)|M| exists (M plus the parents of M), and the
    set-cover stage returns at most mu * (t+1) times the optimum cover.
    """
    t = math.ceil((2 + Fraction(epsilon)) * alpha)
    return Fraction(mu) * (t + 1) ** 2


@dataclass
class MdsResult:
    dominating_set: tuple[int, ...]
    stage_rounds: dict[str, int]
    forests: int
    levels: int
    threshold: int
    phases: int
    max_bits: int
    budget: int
    decomposition: ForestDecomposition = field(repr=False)
    instance: cover_instance.CoverInstance = field(repr=False)
    cover: dist_setcover.CoverResult = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.dominating_set)

    @property
    def total_rounds(self) -> int:
        return sum(self.stage_rounds.values())

    def to_dict(self) -> dict:
        return {
            "dominating_set": list(self.dominating_set),
            "size": self.size,
            "stage_rounds": self.stage_rounds,
            "total_rounds": self.total_rounds,
            "forests": self.forests,
            "levels": self.levels,
            "threshold": self.threshold,
            "phases": self.phases,
            "max_bits": self.max_bits,
            "budget": self.budget,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class PipelineTrace:
    stages: dict[str, congest_sim.RoundTrace]

    @property
    def max_bits(self) -> int:
        return max((t.max_bits for t in self.stages.values()), default=0)

    def to_dict(self) -> dict:
        return {name: t.to_dict() for name, t in self.stages.items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _tagged(stage: str, err: congest_sim.EngineError) -> congest_sim.EngineError:
    err.stage = stage
    return err


def run_pipeline(g: Graph, cfg: PipelineConfig) -> tuple[MdsResult, PipelineTrace]:
    dcfg = cfg.decomp_config(g.n)
    kw = {"round_cap": cfg.round_cap, "bandwidth": cfg.bandwidth}
    try:
        decomp = forest_decomp.decompose(g, dcfg, **kw)
    except congest_sim.EngineError as err:
        raise _tagged("forest_decomp", err)
    fd = decomp.decomposition
    inst = cover_instance.build(fd)
    try:
        cover, sc_trace = dist_setcover.solve(g, inst, cfg.mu, **kw)
    except congest_sim.EngineError as err:
        raise _tagged("dist_setcover", err)
    trace = PipelineTrace(
        {"peel_levels": decomp.peel_trace, "orient_and_assign": decomp.orient_trace, "dist_setcover": sc_trace}
    )
    result = MdsResult(
        dominating_set=cover.chosen,
        stage_rounds={
            "forest_decomp": decomp.rounds,
            "cover_instance": 0,
            "dist_setcover": sc_trace.rounds_executed,
        },
        forests=fd.forests,
        levels=fd.num_levels,
        threshold=dcfg.threshold,
        phases=cover.phases,
        max_bits=trace.max_bits,
        budget=congest_sim.budget(max(g.n, 1), cfg.bandwidth),
        decomposition=fd,
        instance=inst,
        cover=cover,
    )
    return result, trace


CSV_HEADER = ("graph", "n", "m", "alpha", "mode", "size", "opt", "ratio", "rounds", "max_bits")


def csv_record(graph_id: str, g: Graph, cfg: PipelineConfig, result: MdsResult, opt: int | None = None) -> list:
    ratio = "" if not opt else f"{result.size / opt:.4f}"
    return [graph_id, g.n, g.m, cfg.alpha, cfg.mode, result.size, "" if opt is None else opt, ratio,
            result.total_rounds, result.max_bits]
