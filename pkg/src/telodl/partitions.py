"""Ordered repartitions of players over resources.

The reduced state space of the learning dynamics keeps only the
occupancy profile of the all-content, aligned configurations: how many
players sit on each resource, sorted in non-increasing order. This
module enumerates those profiles (integer partitions of K padded to
length N), maps raw action vectors onto them, and provides the
occupancy statistics and neighbour structure that the chain builders
consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence


@dataclass(frozen=True)
class OrderedRepartition:
    """Sorted occupancy vector of players over resources.

    ``s`` has length N, is non-increasing and sums to the player count.
    ``index`` is the 1-based position within the canonical enumeration
    of all repartitions with the same number of occupied resources (it
    does not participate in equality).
    """

    s: tuple[int, ...]
    index: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if any(x < 0 for x in self.s):
            raise ValueError("occupancies must be non-negative")
        if any(self.s[i] < self.s[i + 1] for i in range(len(self.s) - 1)):
            raise ValueError(f"occupancy vector {self.s} is not non-increasing")

    @property
    def resources(self) -> int:
        return len(self.s)

    @property
    def players(self) -> int:
        return sum(self.s)

    @property
    def occupied(self) -> int:
        """Number of resources in use (the level n of this repartition)."""
        return sum(1 for x in self.s if x > 0)

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.s) + ")"


@dataclass(frozen=True)
class OccupancyStats:
    """Per-occupancy resource and player counts of a repartition.

    ``resources(p)`` is the number of resources holding exactly p
    players; ``players(p) = p * resources(p)`` is the number of players
    sharing a resource with p - 1 others.
    """

    counts: tuple[tuple[int, int], ...]  # (occupancy p >= 1, resource count)
    free: int

    def resources(self, p: int) -> int:
        if p == 0:
            return self.free
        return dict(self.counts).get(p, 0)

    def players(self, p: int) -> int:
        return p * self.resources(p) if p >= 1 else 0

    @property
    def interfered_players(self) -> int:
        """Players sharing their resource with at least one other."""
        return sum(p * c for p, c in self.counts if p >= 2)


@lru_cache(maxsize=None)
def part(x: int, n: int) -> int:
    """Number of partitions of x into exactly n positive parts.

    Follows the recursion part(x, n) = part(x-1, n-1) + part(x-n, n)
    with part(x, x) = 1, part(x, 1) = 1 and part(x, n) = 0 for x < n.
    """
    if n < 1:
        raise ValueError("part counts partitions into n >= 1 parts")
    if x < n:
        return 0
    if n == 1 or x == n:
        return 1
    return part(x - 1, n - 1) + part(x - n, n)


def _partitions_exact(total: int, parts: int, max_part: int) -> Iterator[tuple[int, ...]]:
    """Partitions of ``total`` into exactly ``parts`` parts <= max_part,
    in lexicographically decreasing order."""
    if parts == 1:
        if 1 <= total <= max_part:
            yield (total,)
        return
    # The leading part must leave at least parts-1 units for the tail and
    # be at least the average to keep the tuple non-increasing.
    lo = -(-total // parts)  # ceil
    hi = min(max_part, total - (parts - 1))
    for head in range(hi, lo - 1, -1):
        for tail in _partitions_exact(total - head, parts - 1, head):
            yield (head,) + tail


def enumerate_rrc(players: int, resources: int) -> list[OrderedRepartition]:
    """All ordered repartitions of ``players`` over ``resources``.

    For each occupied-resource count n in [1, min(N, K)] the partitions
    of K into exactly n parts are listed in lexicographically decreasing
    order (defining the 1-based index), zero-padded to length N.
    """
    if players < 1 or resources < players:
        raise ValueError("need resources >= players >= 1")
    out: list[OrderedRepartition] = []
    for n in range(1, min(resources, players) + 1):
        for i, p in enumerate(_partitions_exact(players, n, players), start=1):
            out.append(OrderedRepartition(p + (0,) * (resources - n), index=i))
    return out


def reduce_actions(actions: Sequence[int], resources: int) -> OrderedRepartition:
    """Ordered repartition of an action vector.

    Invariant under relabelling both players and resources.
    """
    counts = [0] * resources
    for a in actions:
        if not 1 <= a <= resources:
            raise ValueError(f"resource index {a} outside [1, {resources}]")
        counts[a - 1] += 1
    counts.sort(reverse=True)
    return OrderedRepartition(tuple(counts))


def occupancy(rep: OrderedRepartition) -> OccupancyStats:
    """Occupancy statistics of a repartition (see OccupancyStats)."""
    tally: dict[int, int] = {}
    for x in rep.s:
        if x > 0:
            tally[x] = tally.get(x, 0) + 1
    counts = tuple(sorted(tally.items()))
    return OccupancyStats(counts=counts, free=rep.resources - rep.occupied)


def up_neighbors(rep: OrderedRepartition) -> list[tuple[int, OrderedRepartition]]:
    """Repartitions reachable by moving one player to a free resource.

    For each distinct component value v > 1 the result contains
    ``(k, target)`` where k is the index of the first component holding
    v players and the target is the re-sorted repartition with that
    component decremented and a fresh resource occupied. Components
    sharing the same value map to the same ordered target, so targets
    are emitted once. Empty when every resource is free of interference
    or no free resource remains.
    """
    if rep.occupied == rep.resources:
        return []
    out: list[tuple[int, OrderedRepartition]] = []
    seen: set[int] = set()
    for k, v in enumerate(rep.s):
        if v <= 1 or v in seen:
            continue
        seen.add(v)
        parts = [x for x in rep.s if x > 0]
        parts[k] -= 1
        parts.append(1)
        parts.sort(reverse=True)
        target = tuple(parts) + (0,) * (rep.resources - len(parts))
        out.append((k, OrderedRepartition(target)))
    return out


def full_chain_size(moods: int, resources: int, players: int) -> int:
    """Exact state count of the unreduced learning dynamics.

    Mood, action, benchmark action and benchmark utility are free per
    player (utility is determined by the joint action), giving
    (moods * N^2 * 2) ** K states.
    """
    if moods < 1 or resources < 1 or players < 1:
        raise ValueError("arguments must be positive")
    return (moods * resources * resources * 2) ** players


def reduced_size(players: int, resources: int) -> int:
    """Number of ordered repartitions: sum of part(K, n) over n."""
    if players < 1 or resources < 1:
        raise ValueError("arguments must be positive")
    return sum(part(players, n) for n in range(1, min(resources, players) + 1))
