"""Delay-constrained relay placement: solvers, oracle, and benchmark harness."""

__version__ = "0.1.0"

from .kernels import BACKEND, INF
from .model import (
    Instance,
    InstanceFormatError,
    Point,
    TopologyGraph,
    ValidationError,
    build_graph,
    instance_digest,
    parse_instance,
    serialize_instance,
)
from .hops import (
    HopTable,
    SpTree,
    bfs_from,
    candidates_on_path,
    canonical_path,
    feasible_node,
    hop_table,
    induced_feasibility,
)
from .sca import (
    CoverError,
    Infeasible,
    Solution,
    SolutionFormatError,
    build_solution,
    parse_solution,
    sca_solve,
    serialize_solution,
)
from .sptirp import sptirp_solve
from .oracle import (
    GUARD,
    CandidateLimitError,
    LimitExceeded,
    OracleResult,
    oracle_solve,
    subset_feasible,
    unpruned_minimum,
)
from .bench import (
    DESK_CONFIG,
    FULL_CONFIG,
    CellSummary,
    ExperimentConfig,
    Summary,
    TrialRecord,
    auto_delta,
    emit_plotdata,
    gen_instance,
    parse_summary_csv,
    run_experiment,
    summarize,
)

__all__ = [
    "BACKEND",
    "INF",
    "Instance",
    "InstanceFormatError",
    "Point",
    "TopologyGraph",
    "ValidationError",
    "build_graph",
    "instance_digest",
    "parse_instance",
    "serialize_instance",
    "HopTable",
    "SpTree",
    "bfs_from",
    "candidates_on_path",
    "canonical_path",
    "feasible_node",
    "hop_table",
    "induced_feasibility",
    "CoverError",
    "Infeasible",
    "Solution",
    "SolutionFormatError",
    "build_solution",
    "parse_solution",
    "sca_solve",
    "serialize_solution",
    "sptirp_solve",
    "GUARD",
    "CandidateLimitError",
    "LimitExceeded",
    "OracleResult",
    "oracle_solve",
    "subset_feasible",
    "unpruned_minimum",
    "DESK_CONFIG",
    "FULL_CONFIG",
    "CellSummary",
    "ExperimentConfig",
    "Summary",
    "TrialRecord",
    "auto_delta",
    "emit_plotdata",
    "gen_instance",
    "parse_summary_csv",
    "run_experiment",
    "summarize",
]
