"""Shared types for the reduced approximating Markov chains.

A chain consists of every ordered repartition (the all-content, aligned
occupancy classes) plus the small set of intermediary states attached
to each of them, and a dense row-stochastic transition matrix. The JSON
export schema is fixed:

    {"meta": {"algo", "K", "N", "epsilon", "params"},
     "states": [{"n", "i", "kind", "label"}, ...],
     "matrix": [[row-major probabilities]]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .partitions import OrderedRepartition, enumerate_rrc

ROW_SUM_TOL = 1e-12


class ChainConstructionError(ValueError):
    """A transition row violated non-negativity or conservation."""


class StateKind(str, Enum):
    """Role of a chain state within its repartition set."""

    RRC = "RRC"
    XI0 = "Xi0"
    XI1 = "Xi1"
    XI2 = "Xi2"
    XI3 = "Xi3"
    XI4 = "Xi4"


@dataclass(frozen=True)
class ChainState:
    """One chain state: repartition level n, index i, and its kind."""

    n: int
    i: int
    kind: StateKind
    label: str

    @staticmethod
    def make(rep: OrderedRepartition, kind: StateKind) -> "ChainState":
        label = f"{kind.value}_{rep.occupied}({rep.index}) s={rep}"
        return ChainState(n=rep.occupied, i=rep.index, kind=kind, label=label)


@dataclass
class ApproxChain:
    """Reduced chain: labelled states plus row-stochastic matrix."""

    algorithm: str
    players: int
    resources: int
    epsilon: float
    params: dict
    states: list[ChainState]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        self._pos = {(s.n, s.i, s.kind): idx for idx, s in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def state_index(self, n: int, i: int, kind: StateKind) -> int:
        return self._pos[(n, i, kind)]

    def has_state(self, n: int, i: int, kind: StateKind) -> bool:
        return (n, i, kind) in self._pos

    def rrc_index(self, rep: OrderedRepartition) -> int:
        """Row index of the aligned all-content state of a repartition."""
        canon = {r.s: r for r in enumerate_rrc(self.players, self.resources)}
        r = canon[rep.s]
        return self.state_index(r.occupied, r.index, StateKind.RRC)

    def resolve_state(self, name: str) -> int:
        """Row index for a state name.

        Accepts 'full-collision' (everyone on one resource),
        'orthogonal' (everyone alone), a comma-separated occupancy
        vector such as '3,1,0', or an exact state label.
        """
        if name == "full-collision":
            return self.state_index(1, 1, StateKind.RRC)
        if name == "orthogonal":
            return self.state_index(self.players, 1, StateKind.RRC)
        for idx, s in enumerate(self.states):
            if s.label == name:
                return idx
        try:
            parts = tuple(int(x) for x in name.split(","))
        except ValueError:
            raise KeyError(f"unknown state name {name!r}") from None
        if len(parts) != self.resources or sum(parts) != self.players:
            raise KeyError(f"occupancy vector {name!r} does not fit K={self.players}, "
                           f"N={self.resources}")
        return self.rrc_index(OrderedRepartition(tuple(sorted(parts, reverse=True))))

    def max_row_sum_residual(self) -> float:
        return float(np.abs(self.matrix.sum(axis=1) - 1.0).max())

    def validate(self) -> None:
        m = self.matrix
        if m.shape != (len(self.states), len(self.states)):
            raise ChainConstructionError("matrix shape does not match state count")
        if float(m.min()) < 0.0 or float(m.max()) > 1.0 + ROW_SUM_TOL:
            raise ChainConstructionError("transition probabilities outside [0, 1]")
        resid = self.max_row_sum_residual()
        if resid > ROW_SUM_TOL:
            raise ChainConstructionError(f"row sums deviate from 1 by {resid:.3e}")

    def to_json(self) -> str:
        doc = {
            "meta": {
                "algo": self.algorithm,
                "K": self.players,
                "N": self.resources,
                "epsilon": self.epsilon,
                "params": self.params,
            },
            "states": [
                {"n": s.n, "i": s.i, "kind": s.kind.value, "label": s.label}
                for s in self.states
            ],
            "matrix": [[float(x) for x in row] for row in self.matrix],
        }
        return json.dumps(doc, indent=1)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "ApproxChain":
        doc = json.loads(text)
        meta = doc["meta"]
        states = [
            ChainState(n=s["n"], i=s["i"], kind=StateKind(s["kind"]), label=s["label"])
            for s in doc["states"]
        ]
        return cls(
            algorithm=meta["algo"],
            players=meta["K"],
            resources=meta["N"],
            epsilon=meta["epsilon"],
            params=meta["params"],
            states=states,
            matrix=np.array(doc["matrix"], dtype=float),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ApproxChain":
        return cls.from_json(Path(path).read_text())


def probability_any_experiments(epsilon: float, players: int) -> float:
    """Probability that at least one of ``players`` content players
    experiments in one iteration: 1 - (1 - epsilon)**players."""
    return 1.0 - (1.0 - epsilon) ** players
