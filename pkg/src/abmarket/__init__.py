"""Agent-based stock market on a scale-free trust network.

Investors (imitators, anti-imitators, random traders) combine what their
neighbors did with a momentum signal read off the index, trade one share per
step, and move the index with their net order flow.
"""

from ._kernels import BACKEND, available as available_backends
from .analysis import (
    HistogramSummary,
    HurstEstimate,
    WealthStats,
    hurst_rs,
    profile_wealth_stats,
    return_histogram,
)
from .config import PAPER_PROBABILITIES, SimulationConfig
from .decision import Algorithm, Profile, combine_compare, combine_index, strategy1
from .errors import (
    ABMarketError,
    ConfigError,
    FitUndefinedError,
    HistoryTooShortError,
    InsufficientDataError,
    InsufficientNodesError,
    InvalidDistributionError,
    InvalidParameterError,
    TableMissError,
)
from .experiments import SweepResult, run_hub_vs_periphery, run_sweep
from .market import SimulationOutput, World, build_network, build_world, run, step
from .network import TrustNetwork, degree_distribution, generate_ba, hub, least_connected
from .signals import Action, ProbabilityTable, builtin_table, classify_trend, compute_momentum

__version__ = "0.1.0"

__all__ = [
    "ABMarketError",
    "Action",
    "Algorithm",
    "BACKEND",
    "ConfigError",
    "FitUndefinedError",
    "HistogramSummary",
    "HistoryTooShortError",
    "HurstEstimate",
    "InsufficientDataError",
    "InsufficientNodesError",
    "InvalidDistributionError",
    "InvalidParameterError",
    "PAPER_PROBABILITIES",
    "ProbabilityTable",
    "Profile",
    "SimulationConfig",
    "SimulationOutput",
    "SweepResult",
    "TableMissError",
    "TrustNetwork",
    "WealthStats",
    "World",
    "available_backends",
    "build_network",
    "build_world",
    "builtin_table",
    "classify_trend",
    "combine_compare",
    "combine_index",
    "compute_momentum",
    "degree_distribution",
    "generate_ba",
    "hub",
    "hurst_rs",
    "least_connected",
    "profile_wealth_stats",
    "return_histogram",
    "run",
    "run_hub_vs_periphery",
    "run_sweep",
    "step",
    "strategy1",
]
