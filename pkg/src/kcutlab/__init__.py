"""Max k-cut workbench: formulations, relaxation bounds, exact solvers and
sampled checks of how the relaxations nest."""

from .formulations import (
    Partitioning,
    build_bqo,
    build_emilo,
    build_misdo,
    build_remilo,
    build_vmilo,
    cut_value,
)
from .graph import Graph, gen_instance, parse_edge_list, read_graph

__version__ = "0.1.0"

__all__ = [
    "Graph", "Partitioning", "build_bqo", "build_emilo", "build_misdo", "build_remilo",
    "build_vmilo", "cut_value", "gen_instance", "parse_edge_list", "read_graph",
]
