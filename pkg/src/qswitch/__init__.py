"""LP-based scheduling for entanglement switches.

Layers, bottom up: problem instances (model), exact max-weight matching
(matching), a small two-phase simplex (simplex), scheduling LPs with lazy
odd-set cuts (lp), convex decomposition of LP points into matching mixtures
(decomposition), single-vertex availability chains (refchain), a slotted
simulator (sim), and parameter sweeps with figure-ready data files (sweeps).
"""

from .decomposition import (
    DecompositionError,
    MatchingMixture,
    MixtureAtom,
    decompose,
    sample_matching,
)
from .lp import (
    BlossomCut,
    BlossomViolation,
    LpProblem,
    LpSolution,
    blossom_cut,
    separate_blossom,
    solve_algorithm1,
    solve_algorithm2,
    solve_lp,
)
from .matching import MatchingResult, enumerate_matchings, max_weight_matching
from .model import (
    Edge,
    EdgeDemand,
    InvalidInstanceError,
    Matching,
    NodeParams,
    SwitchInstance,
    build_instance,
    canonical_edge,
    default_variance,
    dump_instance,
    edge_name,
    full_edge_vector,
    is_matching,
    load_instance,
    validate_instance,
)
from .refchain import (
    ChainAnalysis,
    ChainSpec,
    CoherenceReport,
    ConvergenceProfile,
    ReducibleChainError,
    analyze_chain,
    availability,
    build_kernel,
    chain_for_vertex,
    coherence_factor,
    convergence_profile,
    stationary,
)
from .sim import (
    DriftReport,
    SimConfig,
    SimState,
    SimStats,
    drift_report,
    guaranteed_region_check,
    initial_state,
    make_streams,
    run,
    step,
    summary_dict,
    trace_to_csv,
    validate_config,
)
from .sweeps import (
    SweepRow,
    SweepSpec,
    compare_variants,
    gap_profile_rows,
    gaps_to_csv,
    run_sweep,
    standard_grid,
    sweep_to_csv,
    write_data_file,
)

__version__ = "0.1.0"
