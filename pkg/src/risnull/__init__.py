"""Interference nulling and rate optimisation for RIS-assisted interference channels."""

from .channel import (
    ChannelError,
    ChannelModelSpec,
    ChannelRealization,
    RisGeometry,
    UserPlacement,
    array_response,
    direct_cascaded_ratio,
    load_fixture,
    path_loss_db,
    sample_channel,
    sample_direct,
    sample_placement,
    save_fixture,
)
from .config import ConfigError, NetworkConfig, SolverConfig, SweepSpec, parse_config
from .experiments import (
    ExperimentResult,
    convergence_trace_experiment,
    direct_path_study,
    min_rate_sweep,
    nulling_sweep,
    phase_transition_grid,
    sum_rate_sweep,
)
from .nulling import (
    InfeasibleAffineError,
    NullingProblem,
    SolverReport,
    alternating_projection,
    eigen_initialize,
    max_isr_db,
    project_null_space,
    project_torus,
    projected_gradient_baseline,
)
from .utility import (
    LinkBudget,
    link_rates,
    min_rate_subgradient,
    rcg_sum_rate,
    sum_rate,
    sum_rate_gradient,
    two_stage_sum_rate,
)

__version__ = "0.1.0"
