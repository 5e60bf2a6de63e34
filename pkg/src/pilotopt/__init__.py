"""A-optimal pilot pattern design for LMMSE channel estimation on finite
OFDM time-frequency grids over doubly dispersive channels."""

from .channel import (
    ChannelStatistics,
    DelayProfile,
    DopplerSpectrum,
    GridConfig,
    ScatteringSpec,
    build_freq_correlation,
    build_statistics,
    build_time_correlation,
)
from .mcsim import SimConfig, SimResult, run_simulation, sample_channel
from .objective import (
    DesignProblem,
    FractionalAllocation,
    ObjectiveState,
    PilotPattern,
    average_mse,
    build_A,
    compute_alpha,
    error_covariance,
    make_design_problem,
    marginal_gain,
    objective_gradient,
    objective_value,
    rank_one_update,
    swap_delta,
)
from .optimizers import (
    DesignReport,
    LatticeParams,
    best_lattice,
    dependent_rounding,
    exhaustive_search,
    greedy_design,
    lattice_pattern,
    local_swap,
    project_capped_simplex,
    solve_relaxation,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelStatistics",
    "DelayProfile",
    "DesignProblem",
    "DesignReport",
    "DopplerSpectrum",
    "FractionalAllocation",
    "GridConfig",
    "LatticeParams",
    "ObjectiveState",
    "PilotPattern",
    "ScatteringSpec",
    "SimConfig",
    "SimResult",
    "average_mse",
    "best_lattice",
    "build_A",
    "build_freq_correlation",
    "build_statistics",
    "build_time_correlation",
    "compute_alpha",
    "dependent_rounding",
    "error_covariance",
    "exhaustive_search",
    "greedy_design",
    "lattice_pattern",
    "local_swap",
    "make_design_problem",
    "marginal_gain",
    "objective_gradient",
    "objective_value",
    "project_capped_simplex",
    "rank_one_update",
    "run_simulation",
    "sample_channel",
    "solve_relaxation",
    "swap_delta",
]
