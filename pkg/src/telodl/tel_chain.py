"""Reduced Markov chain for the four-mood (TEL) controller.

Each repartition set holds the aligned all-content state plus up to five
intermediary states describing a single perturbation in flight:

* Xi0 - a player left alone is hopeful,
* Xi1 - a player alone is watchful,
* Xi2 - a player alone is discontent,
* Xi3 - two formerly-alone players share a resource, one watchful,
* Xi4 - same configuration with the watchful player now discontent.

The model assumes at most one content player experiments per iteration,
and only from an aligned all-content state; a discontent player adopts a
free resource with probability 1 and an occupied one with probability
epsilon**x where x is the recovery exponent at utility 0 (1/(2K) under
the default boundary constants).
"""

from __future__ import annotations

import numpy as np

from .chain import (ApproxChain, ChainConstructionError, ChainState,
                    StateKind, probability_any_experiments)
from .game import ControllerParams
from .partitions import (OccupancyStats, OrderedRepartition, enumerate_rrc,
                         occupancy, up_neighbors)

Transition = tuple[StateKind, StateKind, float]

_RESIDUE_TOL = 1e-12


def _pairs_plus_single(rep: OrderedRepartition) -> bool:
    """True when every occupied resource holds two players except one
    holding a single player; the hopeful state is unreachable there."""
    parts = [x for x in rep.s if x > 0]
    return parts[-1] == 1 and all(x == 2 for x in parts[:-1])


def tel_state_set(rep: OrderedRepartition) -> list[StateKind]:
    """Kinds present in the set attached to a repartition.

    A fully interfered repartition keeps only its aligned state. One
    player alone admits the watchful/discontent ladder (the hopeful
    state is dropped for the pairs-plus-single shape, where nothing can
    feed it). Two or more players alone additionally admit the
    shared-resource pair states.
    """
    alone = occupancy(rep).resources(1)
    if alone == 0:
        return [StateKind.RRC]
    kinds = [StateKind.RRC]
    if alone >= 2 or not _pairs_plus_single(rep):
        kinds.append(StateKind.XI0)
    kinds += [StateKind.XI1, StateKind.XI2]
    if alone >= 2:
        kinds += [StateKind.XI3, StateKind.XI4]
    return kinds


def _residue(label: str, total_leaving: float) -> float:
    r = 1.0 - total_leaving
    if r < -_RESIDUE_TOL:
        raise ChainConstructionError(
            f"negative conservation residue {r:.3e} in row {label}")
    return max(r, 0.0)


def tel_intra_row(rep: OrderedRepartition, stats: OccupancyStats,
                  epsilon: float, players: int, resources: int,
                  down_exponent: float) -> list[Transition]:
    """Transitions among the states of one repartition set.

    Self-loops absorb exactly the probability mass not routed within the
    set or to neighbouring sets, so rows sum to one once the cross-set
    rows (tel_up_row / tel_down_row) are added.
    """
    k, n = players, resources
    m0 = stats.free
    m1 = stats.resources(1)
    acc = epsilon ** down_exponent
    p_any = probability_any_experiments(epsilon, k)
    kinds = set(tel_state_set(rep))

    rows: list[Transition] = []
    # Aligned state: one experimenter may disturb an alone player or
    # (cross-set) discover a free resource.
    to_watchful = p_any * (k - 1) / k * m1 / (n - 1)
    up_total = p_any * stats.interfered_players / k * m0 / (n - 1)
    if to_watchful > 0.0:
        rows.append((StateKind.RRC, StateKind.XI1, to_watchful))
    rows.append((StateKind.RRC, StateKind.RRC,
                 _residue(f"RRC{rep}", to_watchful + up_total)))

    if StateKind.XI1 in kinds:
        # A second experiment landing on the watchful player turns it
        # discontent; the aligned-state-only experimentation assumption
        # is overridden here, once, to keep the chain ergodic.
        again = probability_any_experiments(epsilon, k - 1) / (n - 1)
        rows.append((StateKind.XI1, StateKind.XI2, again))
        rows.append((StateKind.XI1, StateKind.RRC, 1.0 - again))

    if StateKind.XI2 in kinds:
        to_rc = (m0 + 1) / n
        to_pair = (m1 - 1) / n * acc
        down = (n - m1 - m0) / n * acc
        rows.append((StateKind.XI2, StateKind.RRC, to_rc))
        if to_pair > 0.0:
            rows.append((StateKind.XI2, StateKind.XI3, to_pair))
        rows.append((StateKind.XI2, StateKind.XI2,
                     _residue(f"Xi2{rep}", to_rc + to_pair + down)))

    if StateKind.XI3 in kinds:
        rows.append((StateKind.XI3, StateKind.XI4, 1.0))

    if StateKind.XI4 in kinds:
        to_hopeful = (m0 + 1) / n
        to_pair = (m1 - 2) / n * acc
        down = (n - m1 - m0 + 1) / n * acc
        rows.append((StateKind.XI4, StateKind.XI0, to_hopeful))
        if to_pair > 0.0:
            rows.append((StateKind.XI4, StateKind.XI3, to_pair))
        rows.append((StateKind.XI4, StateKind.XI4,
                     _residue(f"Xi4{rep}", to_hopeful + to_pair + down)))

    if StateKind.XI0 in kinds:
        rows.append((StateKind.XI0, StateKind.RRC, 1.0))
    return rows


def tel_up_row(rep: OrderedRepartition, stats: OccupancyStats, source_value: int,
               epsilon: float, players: int, resources: int) -> list[Transition]:
    """Aligned-state transitions into the neighbouring set one resource up.

    An interfered player on a resource holding ``source_value`` players
    experiments onto a free resource. Leaving behind a single player
    (source_value == 2) makes that player hopeful, so the mass lands on
    the target's Xi0 state instead of its aligned state.
    """
    p = (probability_any_experiments(epsilon, players)
         * stats.players(source_value) / players
         * stats.free / (resources - 1))
    dst = StateKind.RRC if source_value > 2 else StateKind.XI0
    return [(StateKind.RRC, dst, p)]


def tel_down_row(source_rep: OrderedRepartition, source_stats: OccupancyStats,
                 merged_value: int, epsilon: float, players: int,
                 resources: int, down_exponent: float) -> list[Transition]:
    """Discontent-state transitions into the set one resource down.

    ``merged_value`` is the occupancy (in the lower repartition, before
    the original split) minus one: the discontent player joins a
    resource currently holding that many players. Occupancies are those
    of the upper (source) repartition.
    """
    n = resources
    acc = epsilon ** down_exponent
    kinds = set(tel_state_set(source_rep))
    rows: list[Transition] = []
    if merged_value >= 2:
        p = source_stats.resources(merged_value) / n * acc
        if StateKind.XI2 in kinds:
            rows.append((StateKind.XI2, StateKind.RRC, p))
        if StateKind.XI4 in kinds:
            # The partner left behind becomes hopeful in the target set.
            rows.append((StateKind.XI4, StateKind.XI0, p))
    else:
        if StateKind.XI4 in kinds:
            # The discontent player re-adopts its current shared resource.
            rows.append((StateKind.XI4, StateKind.RRC, acc / n))
    return rows


def build_tel_chain(players: int, resources: int, epsilon: float,
                    params: ControllerParams | None = None) -> ApproxChain:
    """Assemble the full reduced chain for the four-mood controller."""
    if players < 2:
        raise ValueError("need at least two players")
    if resources < players:
        raise ValueError("resources must be >= players")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if params is None:
        params = ControllerParams.defaults(players, epsilon)
    down_exponent = params.recovery_exponent(0)

    reps = enumerate_rrc(players, resources)
    canon = {r.s: r for r in reps}
    states: list[ChainState] = []
    pos: dict[tuple[int, int, StateKind], int] = {}
    for rep in reps:
        for kind in tel_state_set(rep):
            pos[(rep.occupied, rep.index, kind)] = len(states)
            states.append(ChainState.make(rep, kind))

    matrix = np.zeros((len(states), len(states)))

    def put(src_key, dst_key, p: float) -> None:
        if p == 0.0:
            return
        if dst_key not in pos:
            raise ChainConstructionError(
                f"transition {src_key} -> {dst_key} targets a missing state")
        matrix[pos[src_key], pos[dst_key]] += p

    for rep in reps:
        n, i = rep.occupied, rep.index
        stats = occupancy(rep)
        for src, dst, p in tel_intra_row(rep, stats, epsilon, players,
                                         resources, down_exponent):
            put((n, i, src), (n, i, dst), p)
        for k, raw_target in up_neighbors(rep):
            target = canon[raw_target.s]
            t_key = (target.occupied, target.index)
            value = rep.s[k]
            for src, dst, p in tel_up_row(rep, stats, value, epsilon,
                                          players, resources):
                put((n, i, src), (*t_key, dst), p)
            t_stats = occupancy(target)
            for src, dst, p in tel_down_row(target, t_stats, value - 1,
                                            epsilon, players, resources,
                                            down_exponent):
                put((*t_key, src), (n, i, dst), p)

    chain = ApproxChain(
        algorithm="tel", players=players, resources=resources,
        epsilon=epsilon,
        params={"nu1": params.nu1, "nu2": params.nu2, "phi1": params.phi1,
                "phi2": params.phi2, "c": params.c},
        states=states, matrix=matrix)
    chain.validate()
    return chain
