"""Decentralized trial-and-error learning on resource-sharing games.

Simulators for the two controllers, their reduced approximating Markov
chains, and hitting-time / stability analytics (analytic and Monte
Carlo) for comparing them.
"""

from .analysis import (AnalysisResult, ErgodicityReport, NumericalError,
                       analyze, efht, fundamental_matrix, oracle_hitting_time,
                       stationary, verify_ergodic)
from .chain import (ApproxChain, ChainConstructionError, ChainState,
                    StateKind, probability_any_experiments)
from .game import (ControllerParams, Mood, NetworkState, PlayerState,
                   compute_utilities, odl_step, step_function, tel_step)
from .montecarlo import (AlphaEstimate, EfhtEstimate, MonteCarloConfig,
                         estimate_alpha, estimate_efht,
                         initial_collision_state)
from .odl_chain import build_odl_chain, odl_state_set
from .partitions import (OccupancyStats, OrderedRepartition, enumerate_rrc,
                         full_chain_size, occupancy, part, reduce_actions,
                         reduced_size, up_neighbors)
from .tel_chain import build_tel_chain, tel_state_set

__all__ = [
    "AnalysisResult", "ErgodicityReport", "NumericalError", "analyze",
    "efht", "fundamental_matrix", "oracle_hitting_time", "stationary",
    "verify_ergodic",
    "ApproxChain", "ChainConstructionError", "ChainState", "StateKind",
    "probability_any_experiments",
    "ControllerParams", "Mood", "NetworkState", "PlayerState",
    "compute_utilities", "odl_step", "step_function", "tel_step",
    "AlphaEstimate", "EfhtEstimate", "MonteCarloConfig", "estimate_alpha",
    "estimate_efht", "initial_collision_state",
    "build_odl_chain", "odl_state_set",
    "OccupancyStats", "OrderedRepartition", "enumerate_rrc",
    "full_chain_size", "occupancy", "part", "reduce_actions",
    "reduced_size", "up_neighbors",
    "build_tel_chain", "tel_state_set",
]

__version__ = "0.1.0"
