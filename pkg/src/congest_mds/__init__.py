"""Deterministic CONGEST simulation of a dominating-set approximation for
bounded-arboricity graphs, with exact oracles for auditing it."""

from .congest_sim import Message, NodeContext, NodeProgram, Step, budget, run
from .graph_model import Graph, GraphSpec, generate, max_degree, read_graph, write_graph
from .mds_pipeline import MdsResult, PipelineConfig, certified_ratio_bound, run_pipeline

__all__ = [
    "Graph",
    "GraphSpec",
    "MdsResult",
    "Message",
    "NodeContext",
    "NodeProgram",
    "PipelineConfig",
    "Step",
    "budget",
    "certified_ratio_bound",
    "generate",
    "max_degree",
    "read_graph",
    "run",
    "run_pipeline",
    "write_graph",
]
