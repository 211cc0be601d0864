"""Exact solver and seeded simulator for finite absorbing Markov chains."""

from .chain import CanonicalChain, ChainSpec, Edge, State, lazy_transform, validate
from .chainfile import ChainDocument, parse, serialize
from .errors import ChainError
from .models import brownian_step_length, drunkard, gamblers_ruin, graph_walk, moran
from .series import short_table_series, truncated_lottery_ev
from .sim import (
    TrialStats,
    lottery_running_mean,
    renewal_experiment,
    run_experiment,
    sample_trajectory,
)
from .solve import (
    SolveReport,
    absorption_probabilities,
    expected_cost,
    expected_visits,
    solve_chain,
    solve_linear_rational,
    survival_after_n,
)

__version__ = "0.1.0"
