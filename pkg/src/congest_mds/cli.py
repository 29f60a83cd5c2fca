"""Command line: generate, run, bench, verify, oracle.

Exit codes: 0 ok, 1 verification failed, 2 parse/parameter error,
3 arboricity promise violated, 4 round cap reached, 5 bandwidth violated.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import oracles
from .audit import audit_run
from .congest_sim import BandwidthViolation, RoundCapExceeded
from .dist_setcover import primal_dual
from .forest_decomp import PromiseViolation
from .graph_model import KINDS, GraphParseError, GraphSpec, ParamError, generate, read_graph, write_graph
from .mds_pipeline import CSV_HEADER, MODES, PipelineConfig, certified_ratio_bound, csv_record, run_pipeline

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_PROMISE, EXIT_ROUND_CAP, EXIT_BANDWIDTH = 0, 1, 2, 3, 4, 5

BENCH_HEADER = (
    "graph", "n", "m", "alpha", "mode", "rounds", "size", "opt", "ratio", "bound",
    "levels", "forests", "max_bits", "budget", "rounds_per_log2n", "error",
)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _error_code(err: Exception) -> int:
    if isinstance(err, PromiseViolation):
        return EXIT_PROMISE
    if isinstance(err, RoundCapExceeded):
        return EXIT_ROUND_CAP
    if isinstance(err, BandwidthViolation):
        return EXIT_BANDWIDTH
    if isinstance(err, (GraphParseError, ParamError, ValueError, json.JSONDecodeError)):
        return EXIT_PARSE
    raise err


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_graph(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as err:
        raise CliError(EXIT_PARSE, str(err)) from None
    return read_graph(text)


def _spec_from_args(args) -> GraphSpec:
    if args.config:
        return GraphSpec.from_dict(json.loads(Path(args.config).read_text()))
    if not args.kind:
        raise ParamError("--kind or --config is required")
    return GraphSpec(args.kind, n=args.n, k=args.k, rows=args.rows, cols=args.cols, alpha=args.alpha, seed=args.seed)


def _pipeline_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        alpha=args.alpha,
        epsilon=Fraction(args.epsilon),
        mu=Fraction(args.mu),
        mode=args.mode,
        round_cap=args.round_cap,
        bandwidth=args.bandwidth,
    )


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --- subcommands -------------------------------------------------------------


def cmd_generate(args) -> int:
    spec = _spec_from_args(args)
    g, cert = generate(spec)
    _write(args.output, write_graph(g))
    if args.certificate:
        Path(args.certificate).write_text(
            json.dumps({"spec": spec.to_dict(), "forests": [list(map(list, f)) for f in cert.forests]}, sort_keys=True)
        )
    return EXIT_OK


def cmd_run(args) -> int:
    g = _load_graph(args.graph)
    cfg = _pipeline_from_args(args)
    result, trace = run_pipeline(g, cfg)
    opt = None
    if args.oracle and g.n <= oracles.DEFAULT_BUDGET.max_mds_nodes:
        opt = len(oracles.cached_exact_mds(g))
    payload = result.to_dict()
    payload["valid"] = oracles.is_dominating(g, result.dominating_set)
    payload["config"] = cfg.to_dict()
    payload["opt"] = opt
    _write(args.json, json.dumps(payload, sort_keys=True) + "\n")
    if args.csv:
        gid = args.graph_id or Path(args.graph).stem
        _write(args.csv, _csv_text(CSV_HEADER, [csv_record(gid, g, cfg, result, opt)]))
    if args.trace:
        Path(args.trace).write_text(trace.to_json() + "\n")
    if args.decomposition:
        Path(args.decomposition).write_text(result.decomposition.to_json() + "\n")
    if args.instance:
        Path(args.instance).write_text(result.instance.to_json() + "\n")
    if args.duals:
        # per-phase snapshots come from the sequential reference, which the audit proves identical
        ref = primal_dual(result.instance.as_set_system(), cfg.mu)
        payload = {**result.cover.to_dict(), "snapshots": ref.to_dict()["snapshots"]}
        Path(args.duals).write_text(json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_OK


def bench_row(spec: GraphSpec, cfg: PipelineConfig, use_oracle: bool) -> list:
    row = {"graph": spec.label(), "alpha": cfg.alpha, "mode": cfg.mode}
    try:
        g, _ = generate(spec)
        row.update(n=g.n, m=g.m)
        result, _trace = run_pipeline(g, cfg)
        row.update(
            rounds=result.total_rounds,
            size=result.size,
            levels=result.levels,
            forests=result.forests,
            max_bits=result.max_bits,
            budget=result.budget,
            rounds_per_log2n=f"{result.total_rounds / math.log2(g.n):.4f}" if g.n > 1 else "",
        )
        if cfg.mode == "standard":
            row["bound"] = str(certified_ratio_bound(cfg.alpha, cfg.epsilon, cfg.mu))
        if use_oracle and g.n <= oracles.DEFAULT_BUDGET.max_mds_nodes:
            opt = len(oracles.cached_exact_mds(g))
            row.update(opt=opt, ratio=f"{result.size / opt:.4f}")
    except Exception as err:  # recorded per row; the bench continues
        row["error"] = _error_code(err)
    return [row.get(k, "") for k in BENCH_HEADER]


def _bench_key(row):
    return (row[0], row[4])


def load_bench_config(args) -> tuple[list[GraphSpec], list[PipelineConfig], bool]:
    if args.config:
        data = json.loads(Path(args.config).read_text())
        specs = [GraphSpec.from_dict(d) for d in data.get("graphs", [])]
        base = dict(data.get("pipeline", {}))
        modes = data.get("modes", [base.pop("mode", "standard")])
        base.pop("mode", None)
        oracle = bool(data.get("oracle", False))
    else:
        sizes = [int(s) for s in args.sizes.split(",") if s] if args.sizes else []
        seeds = range(args.seed, args.seed + args.seeds)
        specs = [GraphSpec(args.kind, n=n, alpha=args.alpha, seed=s) for n in sizes for s in seeds]
        base = {"alpha": args.alpha, "epsilon": args.epsilon, "mu": args.mu, "round_cap": args.round_cap,
                "bandwidth": args.bandwidth}
        modes = args.modes.split(",")
        oracle = args.oracle
    cfgs = []
    for mode in modes:
        cfgs.append(PipelineConfig.from_dict({**base, "mode": mode}))
    return specs, cfgs, oracle


def cmd_bench(args) -> int:
    specs, cfgs, use_oracle = load_bench_config(args)
    jobs = [(spec, PipelineConfig.from_dict({**cfg.to_dict(), "alpha": spec.alpha or cfg.alpha}), use_oracle)
            for spec in specs for cfg in cfgs]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(bench_row, *zip(*jobs)))
    else:
        rows = [bench_row(*job) for job in jobs]
    rows.sort(key=lambda r: (r[1] if r[1] != "" else -1, _bench_key(r)))
    _write(args.output, _csv_text(BENCH_HEADER, rows))
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    cfg = _pipeline_from_args(args)
    audit = audit_run(g, cfg, use_oracle=not args.no_oracle)
    lines = [c.line() for c in audit.checks]
    if audit.ratio is not None:
        lines.append(f"INFO ratio {float(audit.ratio):.4f} (size {audit.result.size}, opt {audit.opt})")
    _write(None, "\n".join(lines) + "\n")
    return EXIT_OK if audit.passed else EXIT_FAILED


def cmd_oracle(args) -> int:
    if args.setcover:
        data = json.loads(Path(args.graph).read_text())
        sets = {int(s["representative"]): s["members"] for s in data["sets"]}
        size = oracles.exact_setcover(sets)
        _write(None, json.dumps({"exact_setcover": size}) + "\n")
        return EXIT_OK
    g = _load_graph(args.graph)
    mds = oracles.cached_exact_mds(g)
    _write(None, json.dumps({"exact_mds": list(mds), "size": len(mds)}) + "\n")
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def _add_pipeline_flags(p: argparse.ArgumentParser, alpha_required=True):
    p.add_argument("--alpha", type=int, required=alpha_required, help="declared arboricity bound")
    p.add_argument("--epsilon", default="1", help="peeling slack, rational (default 1)")
    p.add_argument("--mu", default="2", help="dual multiplier > 1 (default 2)")
    p.add_argument("--mode", choices=MODES, default="standard")
    p.add_argument("--round-cap", type=int, default=100_000)
    p.add_argument("--bandwidth", type=int, default=4, help="ID-sized fields per message (B)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="congest-mds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated graph as an edge list")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--alpha", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="JSON GraphSpec instead of flags")
    p.add_argument("-o", "--output", help="edge-list file (default stdout)")
    p.add_argument("--certificate", help="write the forest certificate as JSON")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="run the pipeline on a graph file")
    p.add_argument("graph")
    _add_pipeline_flags(p)
    p.add_argument("--oracle", action="store_true", help="compute exact MDS when n is within budget")
    p.add_argument("--json", help="result JSON path (default stdout)")
    p.add_argument("--csv", help="CSV record path ('-' for stdout)")
    p.add_argument("--graph-id")
    p.add_argument("--trace", help="round trace JSON path")
    p.add_argument("--decomposition", help="forest decomposition JSON path")
    p.add_argument("--instance", help="set-cover instance JSON path")
    p.add_argument("--duals", help="final duals JSON path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="scaling table over generated fixtures")
    p.add_argument("--config", help="JSON with graphs, pipeline, modes, oracle")
    p.add_argument("--kind", choices=KINDS, default="forest-union")
    p.add_argument("--sizes", default="", help="comma separated node counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=1, help="seeds per size")
    p.add_argument("--modes", default="standard")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    _add_pipeline_flags(p, alpha_required=False)
    p.set_defaults(func=cmd_bench, alpha=2)

    p = sub.add_parser("verify", help="run the pipeline and every invariant check")
    p.add_argument("graph")
    _add_pipeline_flags(p)
    p.add_argument("--no-oracle", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact MDS of a graph, or exact set cover of an instance JSON")
    p.add_argument("graph")
    p.add_argument("--setcover", action="store_true", help="treat the input as an instance JSON")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except Exception as err:
        code = _error_code(err)
        stage = getattr(err, "stage", None)
        print(f"error{f' [{stage}]' if stage else ''}: {err}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
