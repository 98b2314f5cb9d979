"""Stability analysis and self-loop compensation for signed consensus networks."""

from __future__ import annotations

from .compensation import (
    BehaviorPrediction,
    CompensationVector,
    DeltaComparison,
    Regime,
    classify,
    cluster_compensation,
    compare_delta,
    delta,
    optimality_gap,
    predict_steady_state,
    stabilizing_compensation,
    sweep,
    zero_crossings,
)
from .dynamics import SimulationConfig, Trajectory, integrate, reconcile, step_local
from .graph import (
    ComponentPartition,
    GaugePartition,
    Imbalanced,
    NegativeCutClass,
    SignedGraph,
    classify_negative_cut,
    count_components,
    find_bridges,
    is_weight_balanced,
    load_fixture,
    parse_edge_list,
    read_edge_list,
    split_components,
    structural_balance,
)
from .spectral import (
    InertiaBounds,
    SignedLaplacian,
    SpectralReport,
    bronski_bounds,
    eig_general,
    eig_symmetric,
    inertia_negative,
    is_eventually_exp_positive,
    is_eventually_positive,
    laplacian,
    predict_inertia_from_cut,
)

__version__ = "0.1.0"

__all__ = [
    "BehaviorPrediction",
    "CompensationVector",
    "ComponentPartition",
    "DeltaComparison",
    "GaugePartition",
    "Imbalanced",
    "InertiaBounds",
    "NegativeCutClass",
    "Regime",
    "SignedGraph",
    "SignedLaplacian",
    "SimulationConfig",
    "SpectralReport",
    "Trajectory",
    "bronski_bounds",
    "classify",
    "classify_negative_cut",
    "cluster_compensation",
    "compare_delta",
    "count_components",
    "delta",
    "eig_general",
    "eig_symmetric",
    "find_bridges",
    "inertia_negative",
    "integrate",
    "is_eventually_exp_positive",
    "is_eventually_positive",
    "is_weight_balanced",
    "laplacian",
    "load_fixture",
    "optimality_gap",
    "parse_edge_list",
    "predict_inertia_from_cut",
    "predict_steady_state",
    "read_edge_list",
    "reconcile",
    "split_components",
    "stabilizing_compensation",
    "step_local",
    "structural_balance",
    "sweep",
    "zero_crossings",
]
