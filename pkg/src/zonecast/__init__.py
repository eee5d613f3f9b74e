"""Control-zone broadcast: protocol simulator, node-set analysis, evaluation."""

from .analysis import (
    AnalysisResult,
    CoverSearch,
    SafeCover,
    analyze,
    build_communicating_set,
    exhaustive_safe_cover,
    find_safe_cover,
    reliable_set,
    safe_set,
    validate_cover,
)
from .evaluation import (
    EXPLORER,
    Estimate,
    ExperimentConfig,
    ExplorerPaths,
    TrialResult,
    complexity_bound,
    derive_seed,
    estimate_P,
    explorer_paths,
    explorer_success,
    run_trial,
)
from .protocol import (
    AuthMessage,
    NodeState,
    StandardMessage,
    init_node,
    on_auth,
    on_standard,
    try_exit,
)
from .simulator import (
    ByzantineAction,
    ByzantineScript,
    Trace,
    check_safety,
    default_forging_scripts,
    export_trace,
    message_counts,
    run,
)
from .topology import Topology, build_grid, build_torus, is_connected, isolates
from .zones import ControlZone, ZoneSet, ctr_order, fragment_zone, my_ctr, square_zone, validate_zone

__all__ = [
    "AnalysisResult", "AuthMessage", "ByzantineAction", "ByzantineScript",
    "ControlZone", "CoverSearch", "EXPLORER", "Estimate", "ExperimentConfig",
    "ExplorerPaths", "NodeState", "SafeCover", "StandardMessage", "Topology",
    "Trace", "TrialResult", "ZoneSet", "analyze", "build_communicating_set",
    "build_grid", "build_torus", "check_safety", "complexity_bound",
    "ctr_order", "default_forging_scripts", "derive_seed", "estimate_P",
    "exhaustive_safe_cover", "explorer_paths", "explorer_success",
    "export_trace", "find_safe_cover", "fragment_zone", "init_node",
    "is_connected", "isolates", "message_counts", "my_ctr", "on_auth",
    "on_standard", "reliable_set", "run", "run_trial", "safe_set",
    "square_zone", "try_exit", "validate_cover", "validate_zone",
]
