"""Robustness conditions and adversarial simulation for iterative
trim-and-average Byzantine consensus on directed graphs."""

from byztrim.digraph import (
    Condensation,
    Digraph,
    GraphError,
    ReducedGraph,
    condensation,
    count_reduced_graphs,
    parse_graph,
    reduced_graphs,
    source_components,
)
from byztrim.conditions import (
    ConditionReport,
    DegreeViolation,
    Partition,
    PropagationTrace,
    check_partition_condition,
    check_reduced_graph_condition,
    check_source_component_size,
    in_set,
    propagates,
    quick_degree_checks,
    reaches,
)
from byztrim.protocol import NodeState, ProtocolError, RoundMessage, compute_alpha, init_node
from byztrim.simnet import (
    ByzantineSpec,
    SchedulerSpec,
    SimConfig,
    SimulationError,
    Trace,
    build_attack_config,
    byzantine_values,
    run_simulation,
    trace_metrics,
)
from byztrim.harness import (
    ExperimentSpec,
    all_digraphs,
    generate_graph,
    run_experiment,
    verify_contraction,
)

__version__ = "0.1.0"

__all__ = [
    "Condensation",
    "ConditionReport",
    "ByzantineSpec",
    "DegreeViolation",
    "Digraph",
    "ExperimentSpec",
    "GraphError",
    "NodeState",
    "Partition",
    "PropagationTrace",
    "ProtocolError",
    "ReducedGraph",
    "RoundMessage",
    "SchedulerSpec",
    "SimConfig",
    "SimulationError",
    "Trace",
    "all_digraphs",
    "build_attack_config",
    "byzantine_values",
    "check_partition_condition",
    "check_reduced_graph_condition",
    "check_source_component_size",
    "compute_alpha",
    "condensation",
    "count_reduced_graphs",
    "generate_graph",
    "in_set",
    "init_node",
    "parse_graph",
    "propagates",
    "quick_degree_checks",
    "reaches",
    "reduced_graphs",
    "run_experiment",
    "run_simulation",
    "source_components",
    "trace_metrics",
    "verify_contraction",
]
