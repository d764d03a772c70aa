"""Experiment harness: metric cells, sweeps and complexity tables.

A sweep evaluates the cross product of algorithms, player counts and
experimentation probabilities with the analytic chain model, Monte
Carlo, or both, and emits rows in a fixed long CSV schema::

    algo,K,N,epsilon,method,metric,value,std_error,seed,trials

The ``epsilon`` column is the grid value. For TEL it is the controller's
experimentation probability. For ODL it is the controller base epsilon
(experimentation probability epsilon**c) unless epsilon matching is on,
in which case the grid value is the experimentation probability of both
algorithms and the ODL controller runs at epsilon**(1/c). Failed cells
keep their rows with the value column set to NA, so a partial failure
never shifts the schema.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .analysis import analyze
from .chain import ApproxChain
from .game import ControllerParams
from .montecarlo import (DEFAULT_ALPHA_ITERATIONS, DEFAULT_BURN_IN,
                         DEFAULT_EFHT_TRIALS, DEFAULT_MAX_STEPS,
                         MonteCarloConfig, estimate_alpha, estimate_efht)
from .odl_chain import build_odl_chain, odl_state_set
from .partitions import enumerate_rrc, full_chain_size, reduced_size
from .tel_chain import build_tel_chain, tel_state_set

CSV_COLUMNS = ("algo", "K", "N", "epsilon", "method", "metric", "value",
               "std_error", "seed", "trials")
ANALYZE_COLUMNS = ("algo", "K", "N", "epsilon", "method", "efht", "alpha", "seed")
COMPLEXITY_COLUMNS = ("K", "N", "full_chain_tel", "full_chain_odl",
                      "rrc_states", "approx_tel_states", "approx_odl_states")

NA = "NA"

TEL_MOOD_COUNT = 4
ODL_MOOD_COUNT = 2


@dataclass(frozen=True)
class SweepSpec:
    """Grid description for one sweep run."""

    algorithms: tuple[str, ...]
    players: tuple[int, ...]
    epsilons: tuple[float, ...]
    n_delta: int = 0
    methods: tuple[str, ...] = ("approx",)
    match_epsilon: bool = False
    c: float | None = None  # ODL exploration exponent; defaults to K per cell
    seed: int = 0
    efht_trials: int = DEFAULT_EFHT_TRIALS
    alpha_iterations: int = DEFAULT_ALPHA_ITERATIONS
    burn_in: int = DEFAULT_BURN_IN
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self) -> None:
        if not self.algorithms or not self.players or not self.epsilons:
            raise ValueError("algorithm, player and epsilon grids must be non-empty")
        for a in self.algorithms:
            if a not in ("tel", "odl"):
                raise ValueError(f"unknown algorithm {a!r}")
        for m in self.methods:
            if m not in ("approx", "mc"):
                raise ValueError(f"unknown method {m!r}")
        if self.n_delta < 0:
            raise ValueError("the resource surplus must be >= 0")
        if any(k < 2 for k in self.players):
            raise ValueError("sweeps need at least two players")
        if any(not 0.0 < e < 1.0 for e in self.epsilons):
            raise ValueError("epsilon grid values must lie in (0, 1)")


@dataclass(frozen=True)
class CellParams:
    """Resolved parameterization of one (algo, K, N, epsilon) cell."""

    algorithm: str
    players: int
    resources: int
    grid_epsilon: float
    controller: ControllerParams
    chain_epsilon: float
    chain_accept: float | None


@dataclass
class SweepOutcome:
    rows: list[dict] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)


def resolve_cell(algorithm: str, players: int, resources: int,
                 grid_epsilon: float, c: float | None,
                 match_epsilon: bool) -> CellParams:
    """Map a grid epsilon to controller constants and chain parameters.

    TEL: the grid value is the controller epsilon and the chain epsilon.
    ODL: with matching, the grid value is the experimentation
    probability (controller epsilon**(1/c)); without, it is the
    controller epsilon (experimentation probability epsilon**c). The
    chain always receives the experimentation probability plus the
    controller base for its accept/reject factors.
    """
    if algorithm == "tel":
        ctrl = ControllerParams.defaults(players, grid_epsilon, c=c)
        return CellParams(algorithm, players, resources, grid_epsilon,
                          ctrl, grid_epsilon, None)
    exponent = float(c) if c is not None else float(players)
    if match_epsilon:
        ctrl_eps = grid_epsilon ** (1.0 / exponent)
        explore = grid_epsilon
    else:
        ctrl_eps = grid_epsilon
        explore = grid_epsilon ** exponent
    ctrl = ControllerParams.defaults(players, ctrl_eps, c=exponent)
    accept = None if ctrl_eps == explore else ctrl_eps
    return CellParams(algorithm, players, resources, grid_epsilon,
                      ctrl, explore, accept)


def build_cell_chain(cell: CellParams) -> ApproxChain:
    if cell.algorithm == "tel":
        return build_tel_chain(cell.players, cell.resources,
                               cell.chain_epsilon, cell.controller)
    return build_odl_chain(cell.players, cell.resources, cell.chain_epsilon,
                           cell.controller, accept_epsilon=cell.chain_accept)


def _row(cell: CellParams, method: str, metric: str, value, std_error, seed,
         trials) -> dict:
    return {
        "algo": cell.algorithm, "K": cell.players, "N": cell.resources,
        "epsilon": cell.grid_epsilon, "method": method, "metric": metric,
        "value": value, "std_error": std_error, "seed": seed,
        "trials": trials,
    }


def approx_rows(cell: CellParams) -> list[dict]:
    chain = build_cell_chain(cell)
    result = analyze(chain, "full-collision", "orthogonal")
    return [
        _row(cell, "approx", "efht", result.efht, NA, NA, NA),
        _row(cell, "approx", "alpha", result.alpha, NA, NA, NA),
    ]


def mc_rows(cell: CellParams, seed: int, efht_trials: int,
            alpha_iterations: int, burn_in: int, max_steps: int) -> list[dict]:
    config = MonteCarloConfig(
        algorithm=cell.algorithm, players=cell.players,
        resources=cell.resources, params=cell.controller, seed=seed,
        efht_trials=efht_trials, alpha_iterations=alpha_iterations,
        burn_in=burn_in, max_steps_per_trial=max_steps)
    hit = estimate_efht(config)
    frac = estimate_alpha(config)
    return [
        _row(cell, "mc", "efht", hit.mean, hit.std_error, seed, hit.trials_used),
        _row(cell, "mc", "alpha", frac.alpha, frac.std_error, seed,
             frac.iterations),
    ]


def run_sweep(spec: SweepSpec) -> SweepOutcome:
    """Evaluate every grid cell, in deterministic grid order.

    A failing cell contributes NA-valued rows and a failure note; the
    sweep keeps going.
    """
    out = SweepOutcome()
    for algorithm in spec.algorithms:
        for players in spec.players:
            resources = players + spec.n_delta
            for eps in spec.epsilons:
                cell = resolve_cell(algorithm, players, resources, eps,
                                    spec.c, spec.match_epsilon)
                for method in spec.methods:
                    try:
                        if method == "approx":
                            out.rows.extend(approx_rows(cell))
                        else:
                            out.rows.extend(mc_rows(
                                cell, spec.seed, spec.efht_trials,
                                spec.alpha_iterations, spec.burn_in,
                                spec.max_steps))
                    except Exception as exc:  # noqa: BLE001 - cell isolation
                        out.failures.append(
                            f"{algorithm} K={players} N={resources} "
                            f"eps={eps!r} method={method}: {exc}")
                        for metric in ("efht", "alpha"):
                            out.rows.append(_row(cell, method, metric,
                                                 NA, NA, NA, NA))
    return out


def complexity_rows(players: tuple[int, ...], n_delta: int = 0) -> list[dict]:
    """State counts of the exact dynamics, the occupancy classes, and
    both reduced chains."""
    rows = []
    for k in players:
        n = k + n_delta
        reps = enumerate_rrc(k, n)
        rows.append({
            "K": k, "N": n,
            "full_chain_tel": full_chain_size(TEL_MOOD_COUNT, n, k),
            "full_chain_odl": full_chain_size(ODL_MOOD_COUNT, n, k),
            "rrc_states": reduced_size(k, n),
            "approx_tel_states": sum(len(tel_state_set(r)) for r in reps),
            "approx_odl_states": sum(len(odl_state_set(r)) for r in reps),
        })
    return rows


def format_value(x) -> str:
    """Stable scalar formatting: shortest round-trip repr for floats."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def rows_to_csv(rows: list[dict], columns: tuple[str, ...]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()
