"""Reduced Markov chain for the two-mood (ODL) controller.

Each repartition set holds the aligned all-content state plus up to
three intermediary states:

* Xi1 - one player alone on its resource is discontent,
* Xi2 - two players alone are discontent,
* Xi3 - one of two players sharing a resource is discontent.

At most two simultaneous discontent players are modelled; deeper
cascades fold into the conservation self-loops. The chain is
parameterised by a single exploration/acceptance probability
``epsilon``: it models the controller whose content players experiment
with probability epsilon and whose accept/reject draws use base epsilon
(the exploration exponent c equal to 1). For a controller with a larger
c, build the chain at epsilon**c to match its experimentation rate.
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


def odl_state_set(rep: OrderedRepartition) -> list[StateKind]:
    """Kinds present in the set attached to a repartition.

    Xi1 additionally requires at least one interfered player: an alone
    player only turns discontent when somebody lands on its resource,
    so with everyone already alone the state has no inbound transition
    and would break ergodicity if kept.
    """
    stats = occupancy(rep)
    kinds = [StateKind.RRC]
    if stats.resources(1) >= 1 and stats.interfered_players > 0:
        kinds.append(StateKind.XI1)
    if stats.resources(1) >= 2:
        kinds.append(StateKind.XI2)
    if stats.resources(2) >= 1:
        kinds.append(StateKind.XI3)
    return kinds


def _residue(label: str, total_leaving: float) -> float:
    r = 1.0 - total_leaving
    if r < -_RESIDUE_TOL:
        raise ChainConstructionError(
            f"negative conservation residue {r:.3e} in row {label}")
    return max(r, 0.0)


def odl_intra_row(rep: OrderedRepartition, stats: OccupancyStats,
                  epsilon: float, players: int, resources: int,
                  accept_epsilon: float | None = None) -> list[Transition]:
    """Transitions among the states of one repartition set.

    Self-loops subtract the cross-set totals, which equal the per-target
    masses emitted by odl_up_row / odl_down_row, so assembled rows sum
    to one. ``epsilon`` drives the experimentation terms; accept/reject
    draws use ``accept_epsilon`` (same value when omitted).
    """
    k, n = players, resources
    eps = epsilon if accept_epsilon is None else accept_epsilon
    m0 = stats.free
    m1 = stats.resources(1)
    alone = stats.players(1)
    paired = stats.players(2)
    heavy = n - m1 - m0  # resources holding two or more players
    p_any = probability_any_experiments(epsilon, k)
    kinds = set(odl_state_set(rep))

    rows: list[Transition] = []
    # Aligned state.
    to_xi1 = p_any * (k - alone - paired) / k * m1 / (n - 1) * (1 - eps)
    to_xi2 = p_any * alone / k * (m1 - 1) / (n - 1) * (1 - eps) ** 2
    to_xi3 = p_any * paired / k * m1 / (n - 1) * 2 * eps * (1 - eps)
    up_rc = p_any * (k - alone) / k * m0 / (n - 1)
    up_xi1 = p_any * (k - alone) / k * (heavy - 1) / (n - 1) * (1 - eps) \
        if k - alone > 0 else 0.0
    up_xi2 = p_any * (k - alone) / k * m1 / (n - 1) * (1 - eps) ** 2
    down_rc = p_any * alone / k * (heavy / (n - 1) * eps
                                   + (m1 - 1) / (n - 1) * eps ** 2)
    down_xi3 = p_any * alone / k * (m1 - 1) / (n - 1) * 2 * eps * (1 - eps)
    for dst, p in ((StateKind.XI1, to_xi1), (StateKind.XI2, to_xi2),
                   (StateKind.XI3, to_xi3)):
        if p > 0.0:
            rows.append((StateKind.RRC, dst, p))
    leaving = (to_xi1 + to_xi2 + to_xi3 + up_rc + up_xi1 + up_xi2
               + down_rc + down_xi3)
    rows.append((StateKind.RRC, StateKind.RRC, _residue(f"RRC{rep}", leaving)))

    if StateKind.XI1 in kinds:
        to_rc = (m0 + 1) / n
        to_xi2 = (m1 - 1) / n * (1 - eps) ** 2
        down_rc = heavy / n * eps + (m1 - 1) / n * eps ** 2
        down_xi3 = (m1 - 1) / n * 2 * eps * (1 - eps)
        rows.append((StateKind.XI1, StateKind.RRC, to_rc))
        if to_xi2 > 0.0:
            rows.append((StateKind.XI1, StateKind.XI2, to_xi2))
        rows.append((StateKind.XI1, StateKind.XI1,
                     _residue(f"Xi1{rep}", to_rc + to_xi2 + down_rc + down_xi3)))

    if StateKind.XI2 in kinds:
        nn = n * n
        to_rc = (m0 + 2) * (m0 + 1) / nn
        to_xi1 = 2 * (m0 + 2) * heavy / nn * (1 - eps)
        down_rc = ((m0 + 2) * (m1 - 1) / nn * eps ** 2
                   + 2 * (m0 + 2) * heavy / nn * eps)
        down_xi1 = (2 * heavy * heavy / nn * eps * (1 - eps)
                    + 2 * (m1 - 2) * (heavy + 1) / nn * eps ** 2 * (1 - eps))
        down_xi2 = (2 * heavy * (m1 - 2) / nn * eps * (1 - eps) ** 2
                    + (m1 - 2) * (m1 - 3) / nn * eps ** 2 * (1 - eps) ** 2)
        down_xi3 = (m0 + 2) * (m1 - 1) / nn * 2 * eps * (1 - eps)
        rows.append((StateKind.XI2, StateKind.RRC, to_rc))
        if to_xi1 > 0.0:
            rows.append((StateKind.XI2, StateKind.XI1, to_xi1))
        leaving = (to_rc + to_xi1 + down_rc + down_xi1 + down_xi2 + down_xi3)
        rows.append((StateKind.XI2, StateKind.XI2, _residue(f"Xi2{rep}", leaving)))

    if StateKind.XI3 in kinds:
        to_rc = eps / n + m1 / n * eps ** 2
        up_rc = m0 / n
        up_xi1 = (heavy - 1) / n * (1 - eps)
        up_xi2 = m1 / n * (1 - eps) ** 2
        rows.append((StateKind.XI3, StateKind.RRC, to_rc))
        rows.append((StateKind.XI3, StateKind.XI3,
                     _residue(f"Xi3{rep}", to_rc + up_rc + up_xi1 + up_xi2)))
    return rows


def odl_up_row(rep: OrderedRepartition, stats: OccupancyStats,
               source_value: int, epsilon: float, players: int,
               resources: int,
               accept_epsilon: float | None = None) -> list[Transition]:
    """Transitions into the neighbouring set one resource up.

    From the aligned state, a player leaves a resource holding
    ``source_value`` players; the experiment lands on a free resource
    (target aligned state) or on an occupied one leaving one or two
    players discontent. The discontent-pair state routes up only
    through the target created by splitting a two-player resource.
    """
    k, n = players, resources
    eps = epsilon if accept_epsilon is None else accept_epsilon
    m0 = stats.free
    m1 = stats.resources(1)
    heavy = n - m1 - m0
    base = (probability_any_experiments(epsilon, k)
            * stats.players(source_value) / k)
    rows: list[Transition] = [
        (StateKind.RRC, StateKind.RRC, base * m0 / (n - 1)),
        (StateKind.RRC, StateKind.XI1, base * (heavy - 1) / (n - 1) * (1 - eps)),
        (StateKind.RRC, StateKind.XI2, base * m1 / (n - 1) * (1 - eps) ** 2),
    ]
    if source_value == 2 and StateKind.XI3 in odl_state_set(rep):
        rows += [
            (StateKind.XI3, StateKind.RRC, m0 / n),
            (StateKind.XI3, StateKind.XI1, (heavy - 1) / n * (1 - eps)),
            (StateKind.XI3, StateKind.XI2, m1 / n * (1 - eps) ** 2),
        ]
    return rows


def odl_down_row(source_rep: OrderedRepartition, source_stats: OccupancyStats,
                 merged_value: int, epsilon: float, players: int,
                 resources: int,
                 accept_epsilon: float | None = None) -> list[Transition]:
    """Transitions into the set one resource down.

    A wandering or alone player adopts a resource that holds
    ``merged_value`` players in the lower repartition once rejoined.
    Occupancies are those of the upper (source) repartition; the
    merged_value == 1 branch merges two alone players and can leave one
    of them discontent (the target's shared-pair state).
    """
    k, n = players, resources
    eps = epsilon if accept_epsilon is None else accept_epsilon
    m0 = source_stats.free
    m1 = source_stats.resources(1)
    heavy = n - m1 - m0
    p_any = probability_any_experiments(epsilon, k)
    alone = source_stats.players(1)
    kinds = set(odl_state_set(source_rep))
    rows: list[Transition] = []
    if merged_value >= 2:
        mq = source_stats.resources(merged_value)
        rows.append((StateKind.RRC, StateKind.RRC,
                     p_any * alone / k * mq / (n - 1) * eps))
        if StateKind.XI1 in kinds:
            rows.append((StateKind.XI1, StateKind.RRC, mq / n * eps))
        if StateKind.XI2 in kinds:
            rows += [
                (StateKind.XI2, StateKind.RRC, 2 * (m0 + 2) / n * mq / n * eps),
                (StateKind.XI2, StateKind.XI1,
                 2 * mq / n * eps * heavy / n * (1 - eps)),
                (StateKind.XI2, StateKind.XI2,
                 2 * mq / n * eps * (m1 - 2) / n * (1 - eps) ** 2),
            ]
    else:
        rows.append((StateKind.RRC, StateKind.RRC,
                     p_any * alone / k * (m1 - 1) / (n - 1) * eps ** 2))
        rows.append((StateKind.RRC, StateKind.XI3,
                     p_any * alone / k * (m1 - 1) / (n - 1) * 2 * eps * (1 - eps)))
        if StateKind.XI1 in kinds:
            rows += [
                (StateKind.XI1, StateKind.RRC, (m1 - 1) / n * eps ** 2),
                (StateKind.XI1, StateKind.XI3,
                 (m1 - 1) / n * 2 * eps * (1 - eps)),
            ]
        if StateKind.XI2 in kinds:
            rows += [
                (StateKind.XI2, StateKind.RRC,
                 (m0 + 2) / n * (m1 - 1) / n * eps ** 2),
                (StateKind.XI2, StateKind.XI1,
                 2 * (m1 - 2) / n * eps ** 2 * (heavy + 1) / n * (1 - eps)),
                (StateKind.XI2, StateKind.XI2,
                 (m1 - 2) / n * eps ** 2 * (m1 - 3) / n * (1 - eps) ** 2),
                (StateKind.XI2, StateKind.XI3,
                 (m0 + 2) / n * (m1 - 1) / n * 2 * eps * (1 - eps)),
            ]
    return rows


def build_odl_chain(players: int, resources: int, epsilon: float,
                    params: ControllerParams | None = None,
                    accept_epsilon: float | None = None) -> ApproxChain:
    """Assemble the full reduced chain for the two-mood controller.

    ``epsilon`` is the per-player experimentation probability entering
    the at-least-one-experiment factors. By default the accept/reject
    draws use the same base, which models a controller whose
    exploration exponent c is 1. To model a controller with epsilon_0
    and c > 1, pass epsilon = epsilon_0**c (its experimentation
    probability) and accept_epsilon = epsilon_0.
    """
    if players < 2:
        raise ValueError("need at least two players")
    if resources < players:
        raise ValueError("resources must be >= players")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if accept_epsilon is not None and not 0.0 < accept_epsilon < 1.0:
        raise ValueError("accept_epsilon must lie in (0, 1)")
    if params is None:
        params = ControllerParams.defaults(
            players, epsilon if accept_epsilon is None else accept_epsilon)

    reps = enumerate_rrc(players, resources)
    canon = {r.s: r for r in reps}
    states: list[ChainState] = []
    pos: dict[tuple[int, int, StateKind], int] = {}
    for rep in reps:
        for kind in odl_state_set(rep):
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
        for src, dst, p in odl_intra_row(rep, stats, epsilon, players,
                                         resources, accept_epsilon):
            put((n, i, src), (n, i, dst), p)
        for k, raw_target in up_neighbors(rep):
            target = canon[raw_target.s]
            t_key = (target.occupied, target.index)
            value = rep.s[k]
            for src, dst, p in odl_up_row(rep, stats, value, epsilon,
                                          players, resources, accept_epsilon):
                put((n, i, src), (*t_key, dst), p)
            t_stats = occupancy(target)
            for src, dst, p in odl_down_row(target, t_stats, value - 1,
                                            epsilon, players, resources,
                                            accept_epsilon):
                put((*t_key, src), (n, i, dst), p)

    meta = {"nu1": params.nu1, "nu2": params.nu2, "phi1": params.phi1,
            "phi2": params.phi2, "c": params.c}
    if accept_epsilon is not None:
        meta["accept_epsilon"] = accept_epsilon
    chain = ApproxChain(
        algorithm="odl", players=players, resources=resources,
        epsilon=epsilon, params=meta, states=states, matrix=matrix)
    chain.validate()
    return chain
