"""Minimal entanglement of bipartite decompositions (MEBD) for dipolar spin chains."""

from ._core import (
    MebdError,
    basis_index,
    build_hdz,
    double_negativity,
    enumerate_bipartitions,
    evolve,
    find_first_maximum,
    lower_estimate_1,
    lower_estimate_level,
    mebd,
    partial_trace,
    partial_transpose,
    pure_density,
    run_sweep,
    single_node_witness,
)

__all__ = [
    "MebdError",
    "basis_index",
    "build_hdz",
    "double_negativity",
    "enumerate_bipartitions",
    "evolve",
    "find_first_maximum",
    "lower_estimate_1",
    "lower_estimate_level",
    "mebd",
    "partial_trace",
    "partial_transpose",
    "pure_density",
    "run_sweep",
    "single_node_witness",
]
__version__ = "0.1.0"
