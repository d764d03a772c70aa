"""Synchronous simulation of the TEL and ODL learning controllers.

K players repeatedly pick one of N shared resources. A player scores
utility 1 when it is alone on its resource and 0 otherwise. Each player
runs a small mood-based controller (TEL uses four moods, ODL two) that
decides when to experiment with a new resource and when to adopt what it
just played as its new benchmark.

All state transitions here are exact implementations of the controller
rules; one call to :func:`tel_step` / :func:`odl_step` advances every
player by one synchronous iteration.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Sequence


class Mood(IntEnum):
    """Controller mood of a single player.

    ODL states use only CONTENT and DISCONTENT; TEL may use all four.
    """

    CONTENT = 0
    HOPEFUL = 1
    WATCHFUL = 2
    DISCONTENT = 3


TEL_MOODS = frozenset(Mood)
ODL_MOODS = frozenset({Mood.CONTENT, Mood.DISCONTENT})


@dataclass(frozen=True)
class PlayerState:
    """Full controller state of one player.

    Actions are 1-based resource indices; utilities are binary.
    """

    mood: Mood
    action: int
    benchmark_action: int
    utility: int
    benchmark_utility: int


@dataclass(frozen=True)
class NetworkState:
    """Joint state of all K players plus the resource count N.

    Stored as parallel tuples so the simulation loop does not have to
    build per-player objects on every iteration.
    """

    moods: tuple[Mood, ...]
    actions: tuple[int, ...]
    benchmark_actions: tuple[int, ...]
    utilities: tuple[int, ...]
    benchmark_utilities: tuple[int, ...]
    resources: int

    def __post_init__(self) -> None:
        k = len(self.moods)
        fields = (self.actions, self.benchmark_actions, self.utilities,
                  self.benchmark_utilities)
        if any(len(f) != k for f in fields):
            raise ValueError("player component tuples must have equal length")
        for a in self.actions + self.benchmark_actions:
            if not 1 <= a <= self.resources:
                raise ValueError(f"resource index {a} outside [1, {self.resources}]")
        for u in self.utilities + self.benchmark_utilities:
            if u not in (0, 1):
                raise ValueError(f"utility {u} is not binary")

    @classmethod
    def from_players(cls, players: Sequence[PlayerState], resources: int) -> "NetworkState":
        return cls(
            moods=tuple(p.mood for p in players),
            actions=tuple(p.action for p in players),
            benchmark_actions=tuple(p.benchmark_action for p in players),
            utilities=tuple(p.utility for p in players),
            benchmark_utilities=tuple(p.benchmark_utility for p in players),
            resources=resources,
        )

    @property
    def players(self) -> list[PlayerState]:
        return [
            PlayerState(m, a, ba, u, bu)
            for m, a, ba, u, bu in zip(
                self.moods, self.actions, self.benchmark_actions,
                self.utilities, self.benchmark_utilities)
        ]

    @property
    def num_players(self) -> int:
        return len(self.moods)

    @property
    def is_aligned(self) -> bool:
        """Every player currently plays its benchmark and scores it."""
        return (self.actions == self.benchmark_actions
                and self.utilities == self.benchmark_utilities)

    @property
    def is_rc(self) -> bool:
        """All content and aligned: absorbing absent any experimentation."""
        return self.is_aligned and all(m == Mood.CONTENT for m in self.moods)


@dataclass(frozen=True)
class ControllerParams:
    """Constants shared by the TEL and ODL controllers.

    The TEL experiment-acceptance exponent is the affine map
    ``accept_exponent(x) = -nu1 * x + nu2`` and the discontent-recovery
    exponent is ``recovery_exponent(u) = -phi1 * u + phi2``; acceptance
    probabilities are ``epsilon ** exponent``. ``c`` is the ODL
    exploration exponent (content players experiment with probability
    ``epsilon ** c``).

    The ODL reference description requires c > K while the reported
    experiments use c = K; any c > 0 is accepted here.
    """

    epsilon: float
    nu1: float
    nu2: float
    phi1: float
    phi2: float
    c: float

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.c <= 0.0:
            raise ValueError("c must be positive")
        g1 = self.accept_exponent(1.0)
        if not 0.0 < g1 < 0.5:
            raise ValueError(f"accept_exponent(1) = {g1} outside (0, 1/2)")

    @classmethod
    def defaults(cls, players: int, epsilon: float, c: float | None = None) -> "ControllerParams":
        """Constants matching the boundary convention used by the chain models.

        recovery_exponent(0) = 1/(2K) and recovery_exponent(1) = 0, so a
        discontent player adopts a free resource with probability 1; the
        experiment-acceptance probability epsilon**0.01 is close to 1.
        """
        half = 1.0 / (2.0 * players)
        return cls(epsilon=epsilon, nu1=0.48, nu2=0.49,
                   phi1=half, phi2=half, c=float(c if c is not None else players))

    def accept_exponent(self, delta_u: float) -> float:
        return -self.nu1 * delta_u + self.nu2

    def recovery_exponent(self, u: float) -> float:
        return -self.phi1 * u + self.phi2

    def with_epsilon(self, epsilon: float) -> "ControllerParams":
        return replace(self, epsilon=epsilon)


def compute_utilities(actions: Sequence[int], resources: int) -> tuple[int, ...]:
    """Binary utilities under the interference model.

    A player scores 1 iff nobody else chose its resource.
    """
    counts = [0] * (resources + 1)
    for a in actions:
        if not 1 <= a <= resources:
            raise ValueError(f"resource index {a} outside [1, {resources}]")
        counts[a] += 1
    return tuple(1 if counts[a] == 1 else 0 for a in actions)


def _pick_other(rng: random.Random, n: int, avoid: int) -> int:
    """Uniform draw over the n - 1 resources different from ``avoid``."""
    r = rng.randrange(n - 1) + 1
    return r + 1 if r >= avoid else r


def tel_step(state: NetworkState, params: ControllerParams,
             rng: random.Random) -> NetworkState:
    """One synchronous TEL iteration.

    Every player first picks an action (content players experiment with
    probability epsilon, discontent players randomize over all N
    resources, hopeful/watchful players replay their benchmark), then
    utilities are recomputed, then every mood and benchmark is updated
    against the pre-update benchmarks.
    """
    n = state.resources
    eps = params.epsilon
    moods = state.moods
    bench_a = state.benchmark_actions
    bench_u = state.benchmark_utilities

    actions: list[int] = []
    experimented: list[bool] = []
    for k, m in enumerate(moods):
        tried = False
        if m == Mood.CONTENT:
            # With a single resource there is nothing to experiment on.
            if n > 1 and rng.random() < eps:
                tried = True
                a = _pick_other(rng, n, bench_a[k])
            else:
                a = bench_a[k]
        elif m == Mood.DISCONTENT:
            a = rng.randrange(n) + 1
        else:  # hopeful and watchful replay the benchmark
            a = bench_a[k]
        actions.append(a)
        experimented.append(tried)

    utilities = compute_utilities(actions, n)

    new_moods: list[Mood] = []
    new_bench_a = list(bench_a)
    new_bench_u = list(bench_u)
    for k, m in enumerate(moods):
        u, bu = utilities[k], bench_u[k]
        if m == Mood.CONTENT:
            if experimented[k]:
                # Only an improvement can be adopted; a worse draw is
                # simply abandoned and the player stays content.
                if u > bu and rng.random() < eps ** params.accept_exponent(u - bu):
                    new_bench_a[k] = actions[k]
                    new_bench_u[k] = u
                nm = Mood.CONTENT
            else:
                nm = Mood.HOPEFUL if u > bu else Mood.WATCHFUL if u < bu else Mood.CONTENT
        elif m == Mood.HOPEFUL:
            if u > bu:
                nm = Mood.CONTENT
                new_bench_u[k] = u
            else:
                nm = Mood.WATCHFUL if u < bu else Mood.CONTENT
        elif m == Mood.WATCHFUL:
            nm = Mood.HOPEFUL if u > bu else Mood.DISCONTENT if u < bu else Mood.CONTENT
        else:  # discontent
            if rng.random() < eps ** params.recovery_exponent(u):
                nm = Mood.CONTENT
                new_bench_a[k] = actions[k]
                new_bench_u[k] = u
            else:
                nm = Mood.DISCONTENT
        new_moods.append(nm)

    return NetworkState(tuple(new_moods), tuple(actions), tuple(new_bench_a),
                        utilities, tuple(new_bench_u), n)


def odl_step(state: NetworkState, params: ControllerParams,
             rng: random.Random) -> NetworkState:
    """One synchronous ODL iteration.

    Content players experiment with probability epsilon**c; any observed
    utility change is accepted with probability epsilon**(1 - u) and
    otherwise turns the player discontent. Discontent players randomize
    over all resources and recover with probability epsilon**(1 - u).
    """
    if any(m not in ODL_MOODS for m in state.moods):
        raise ValueError("ODL states admit only content and discontent moods")

    n = state.resources
    eps = params.epsilon
    explore_p = eps ** params.c
    moods = state.moods
    bench_a = state.benchmark_actions
    bench_u = state.benchmark_utilities

    actions: list[int] = []
    experimented: list[bool] = []
    for k, m in enumerate(moods):
        tried = False
        if m == Mood.CONTENT:
            if n > 1 and rng.random() < explore_p:
                tried = True
                a = _pick_other(rng, n, bench_a[k])
            else:
                a = bench_a[k]
        else:
            a = rng.randrange(n) + 1
        actions.append(a)
        experimented.append(tried)

    utilities = compute_utilities(actions, n)

    new_moods: list[Mood] = []
    new_bench_a = list(bench_a)
    new_bench_u = list(bench_u)
    for k, m in enumerate(moods):
        u, bu = utilities[k], bench_u[k]
        if m == Mood.CONTENT:
            if u != bu:
                if rng.random() < eps ** (1 - u):
                    new_bench_u[k] = u
                    if experimented[k]:
                        new_bench_a[k] = actions[k]
                    nm = Mood.CONTENT
                else:
                    nm = Mood.DISCONTENT
            else:
                nm = Mood.CONTENT
        else:
            if rng.random() < eps ** (1 - u):
                nm = Mood.CONTENT
                new_bench_a[k] = actions[k]
                new_bench_u[k] = u
            else:
                nm = Mood.DISCONTENT
        new_moods.append(nm)

    return NetworkState(tuple(new_moods), tuple(actions), tuple(new_bench_a),
                        utilities, tuple(new_bench_u), n)


def step_function(algorithm: str):
    """Dispatch 'tel' / 'odl' to the matching step function."""
    if algorithm == "tel":
        return tel_step
    if algorithm == "odl":
        return odl_step
    raise ValueError(f"unknown algorithm {algorithm!r} (expected 'tel' or 'odl')")
