"""Unicycle rendezvous on directed sensor graphs.

Thin Python layer over the C++ core: graph analysis, closed-loop
simulation, Lyapunov certificates and gain sweeps.
"""

from ._core import (
    CertifyReport,
    Condensation,
    DiGraph,
    Error,
    LayerDecomposition,
    Scenario,
    SweepTable,
    Trajectory,
    build_digraph,
    certify,
    chi_transform,
    compute_alpha_star,
    compute_gamma,
    consensus_field,
    diameter,
    has_reverse_spanning_tree,
    k1_sweep,
    layer_sets,
    load_scenario,
    make_scenario,
    random_initial_state,
    run,
    strongly_connected_components,
    weighted_laplacian,
)

__all__ = [
    "CertifyReport",
    "Condensation",
    "DiGraph",
    "Error",
    "LayerDecomposition",
    "Scenario",
    "SweepTable",
    "Trajectory",
    "build_digraph",
    "certify",
    "chi_transform",
    "compute_alpha_star",
    "compute_gamma",
    "consensus_field",
    "diameter",
    "has_reverse_spanning_tree",
    "k1_sweep",
    "layer_sets",
    "load_scenario",
    "make_scenario",
    "random_initial_state",
    "run",
    "strongly_connected_components",
    "weighted_laplacian",
]
