"""Trajectory-level estimation of the convergence metrics.

Runs the actual controllers and measures (i) the expected first hitting
time from the everyone-on-one-resource start to the everyone-alone
configuration and (ii) the long-run fraction of time spent aligned,
all-content and collision-free. These estimates are the ground truth
the reduced chain models are judged against.

Every trial draws its random stream deterministically from the master
seed and its trial index, and results are aggregated in trial order, so
estimates are bit-identical for a fixed seed no matter how trials would
be scheduled.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass

from .game import (ControllerParams, Mood, NetworkState, compute_utilities,
                   step_function)

DEFAULT_EFHT_TRIALS = 5000
DEFAULT_ALPHA_ITERATIONS = 10 ** 6
DEFAULT_BURN_IN = 1000
DEFAULT_MAX_STEPS = 10 ** 8

_ALPHA_STREAM = 0x0A1F4A  # keeps the alpha trajectory off the trial streams


@dataclass(frozen=True)
class MonteCarloConfig:
    algorithm: str
    players: int
    resources: int
    params: ControllerParams
    seed: int
    efht_trials: int = DEFAULT_EFHT_TRIALS
    alpha_iterations: int = DEFAULT_ALPHA_ITERATIONS
    burn_in: int = DEFAULT_BURN_IN
    max_steps_per_trial: int = DEFAULT_MAX_STEPS

    def __post_init__(self) -> None:
        if self.algorithm not in ("tel", "odl"):
            raise ValueError("algorithm must be 'tel' or 'odl'")
        if self.players < 1 or self.resources < self.players:
            raise ValueError("need resources >= players >= 1")
        if self.efht_trials < 1 or self.alpha_iterations < 1:
            raise ValueError("trial counts must be >= 1")
        if self.burn_in < 0 or self.max_steps_per_trial < 1:
            raise ValueError("burn_in must be >= 0 and the step cap >= 1")


@dataclass(frozen=True)
class EfhtEstimate:
    mean: float
    std_error: float
    trials_used: int
    censored_trials: int = 0


@dataclass(frozen=True)
class AlphaEstimate:
    alpha: float
    std_error: float
    iterations: int


def initial_collision_state(players: int, resources: int) -> NetworkState:
    """Everyone content, aligned, on resource 1."""
    if players < 1 or resources < players:
        raise ValueError("need resources >= players >= 1")
    actions = (1,) * players
    utilities = compute_utilities(actions, resources)
    return NetworkState(
        moods=(Mood.CONTENT,) * players,
        actions=actions,
        benchmark_actions=actions,
        utilities=utilities,
        benchmark_utilities=utilities,
        resources=resources,
    )


def _trial_rng(seed: int, stream: int) -> random.Random:
    return random.Random((seed << 32) + stream)


def _all_alone(state: NetworkState) -> bool:
    return len(set(state.actions)) == state.num_players


def estimate_efht(config: MonteCarloConfig) -> EfhtEstimate:
    """Mean first iteration at which all players sit on distinct resources.

    Trials that exhaust the step cap are excluded from the mean and
    reported as censored; if every trial is censored there is nothing to
    average and a RuntimeError is raised.
    """
    step = step_function(config.algorithm)
    start = initial_collision_state(config.players, config.resources)
    hits: list[int] = []
    censored = 0
    for trial in range(config.efht_trials):
        rng = _trial_rng(config.seed, trial)
        state = start
        t = 0
        while not _all_alone(state):
            if t >= config.max_steps_per_trial:
                censored += 1
                t = -1
                break
            state = step(state, config.params, rng)
            t += 1
        if t >= 0:
            hits.append(t)
    if not hits:
        raise RuntimeError("every trial exhausted the step cap")
    mean = statistics.fmean(hits)
    if len(hits) > 1:
        std_error = statistics.stdev(hits) / math.sqrt(len(hits))
    else:
        std_error = 0.0
    return EfhtEstimate(mean=mean, std_error=std_error,
                        trials_used=len(hits), censored_trials=censored)


def estimate_alpha(config: MonteCarloConfig, batches: int = 100) -> AlphaEstimate:
    """Fraction of one long trajectory spent aligned, content and alone.

    Only iterations whose state is a recurrence configuration with all
    players on distinct resources count as hits. The standard error
    comes from batch means, since consecutive iterations of a single
    trajectory are strongly correlated and the naive binomial estimate
    would be far too small.
    """
    step = step_function(config.algorithm)
    rng = _trial_rng(config.seed, _ALPHA_STREAM)
    state = initial_collision_state(config.players, config.resources)
    for _ in range(config.burn_in):
        state = step(state, config.params, rng)

    total = config.alpha_iterations
    batches = max(1, min(batches, total))
    base, extra = divmod(total, batches)
    batch_means: list[float] = []
    hits_total = 0
    for b in range(batches):
        size = base + (1 if b < extra else 0)
        if size == 0:
            continue
        hits = 0
        for _ in range(size):
            state = step(state, config.params, rng)
            if _all_alone(state) and state.is_rc:
                hits += 1
        hits_total += hits
        batch_means.append(hits / size)
    alpha = hits_total / total
    if len(batch_means) > 1:
        std_error = statistics.stdev(batch_means) / math.sqrt(len(batch_means))
    else:
        std_error = 0.0
    return AlphaEstimate(alpha=alpha, std_error=std_error, iterations=total)
