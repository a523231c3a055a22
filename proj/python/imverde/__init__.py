"""Class-aware node embeddings from diminishing random walks."""

from ._core import (
    DegenerateError,
    Graph,
    ImverdeError,
    IoError,
    NumericError,
    ParseError,
    ValidationError,
    average_precision,
    convergence_trace,
    karate_graph,
    load_edge_list,
    load_planetoid,
    planted_partition,
    purity_study,
    roc_auc,
    run_command,
    train_embeddings,
    walk,
)

__all__ = [
    "DegenerateError",
    "Graph",
    "ImverdeError",
    "IoError",
    "NumericError",
    "ParseError",
    "ValidationError",
    "average_precision",
    "convergence_trace",
    "karate_graph",
    "load_edge_list",
    "load_planetoid",
    "planted_partition",
    "purity_study",
    "roc_auc",
    "run_command",
    "train_embeddings",
    "walk",
]
