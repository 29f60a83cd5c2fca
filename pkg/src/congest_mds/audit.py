"""Run the pipeline on one graph and check every invariant it promises."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import cover_instance, dist_setcover, forest_decomp, oracles
from .graph_model import Graph
from .mds_pipeline import MdsResult, PipelineConfig, PipelineTrace, certified_ratio_bound, run_pipeline


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class Audit:
    result: MdsResult
    trace: PipelineTrace
    checks: list[Check]
    opt: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def ratio(self) -> Fraction | None:
        return None if not self.opt else Fraction(self.result.size, self.opt)


def audit_run(
    g: Graph,
    cfg: PipelineConfig,
    *,
    use_oracle: bool = True,
    budget: oracles.OracleBudget = oracles.DEFAULT_BUDGET,
    cache_dir=None,
) -> Audit:
    result, trace = run_pipeline(g, cfg)
    fd, inst, cover = result.decomposition, result.instance, result.cover
    sets = inst.as_set_system()
    checks = []

    def add(name, ok, detail=""):
        checks.append(Check(name, bool(ok), detail))

    add("dominating", oracles.is_dominating(g, result.dominating_set), f"size {result.size}")
    problems = forest_decomp.check_decomposition(g, fd)
    add("decomposition", not problems, "; ".join(problems[:3]))
    add("forest_count", fd.forests <= result.threshold, f"f={fd.forests} <= t={result.threshold}")
    add("edge_partition", sum(len(p) for p in fd.parents) == g.m, f"sum |P(u)| = {g.m}")
    add("frequency_lemma", inst.frequency <= fd.forests + 1, f"f_freq={inst.frequency} <= f+1={fd.forests + 1}")
    problems = cover_instance.check_instance(inst, fd)
    add("cover_instance", not problems, "; ".join(problems[:3]))
    add("instance_rounds", result.stage_rounds["cover_instance"] == 0)
    add("bandwidth", trace.max_bits <= result.budget, f"max {trace.max_bits} <= budget {result.budget}")
    ref = dist_setcover.primal_dual(sets, cfg.mu)
    add(
        "setcover_reference",
        ref.chosen == cover.chosen and ref.duals == cover.duals,
        "distributed run matches sequential primal-dual",
    )
    opt_cover = None
    opt = None
    if use_oracle and g.n <= budget.max_mds_nodes:
        opt_cover = oracles.exact_setcover(sets, budget=budget)
        mds = oracles.cached_exact_mds(g, cache_dir, budget)
        opt = len(mds)
        ex = oracles.existence_bound_check(g, fd, mds, budget)
        add("existence_bound", ex.passed, f"|D|={len(ex.witness)} <= (f+1)|M|={ex.bound}")
        if cfg.mode == "standard" and cfg.epsilon == 1:
            limit = (3 * cfg.alpha + 1) * opt
            add("existence_bound_alpha", len(ex.witness) <= limit, f"|D|={len(ex.witness)} <= (3a+1)|M|={limit}")
        add("size_at_least_opt", result.size >= opt, f"{result.size} >= {opt}")
        if cfg.mode == "standard":
            bound = certified_ratio_bound(cfg.alpha, cfg.epsilon, cfg.mu)
            add("ratio_bound", result.size <= bound * opt, f"{result.size}/{opt} <= {bound}")
        add("cover_guarantee", cover.size <= cfg.mu * inst.frequency * opt_cover,
            f"{cover.size} <= {cfg.mu}*{inst.frequency}*{opt_cover}")
    problems = dist_setcover.check_result(sets, cover, cfg.mu, opt_cover)
    add("dual_chain", not problems, "; ".join(problems[:3]))
    return Audit(result, trace, checks, opt)
