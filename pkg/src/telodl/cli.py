"""Command line interface.

Subcommands:

* ``chain build``   - build a reduced chain and write it as JSON.
* ``chain analyze`` - hitting time / stability of a chain file.
* ``simulate``      - Monte Carlo estimates for one configuration.
* ``sweep``         - grid sweep over algorithms, players and epsilon.
* ``complexity``    - state-count comparison table.

All data output is CSV (or chain JSON) and byte-stable for a fixed
seed; ``sweep --plot`` additionally renders figures next to the CSV. A
JSON config file can pre-fill any flag (keys are flag names with
underscores); explicit flags win.

Exit codes: 0 success, 1 validation error, 2 numerical failure
(ergodicity, singular solve, exhausted trials), 3 partial sweep failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .analysis import NumericalError, analyze, verify_ergodic
from .chain import ApproxChain, ChainConstructionError
from .experiments import (ANALYZE_COLUMNS, COMPLEXITY_COLUMNS, CSV_COLUMNS, NA,
                          SweepSpec, complexity_rows, format_value, mc_rows,
                          resolve_cell, rows_to_csv, run_sweep)
from .game import ControllerParams
from .montecarlo import (DEFAULT_ALPHA_ITERATIONS, DEFAULT_BURN_IN,
                         DEFAULT_EFHT_TRIALS, DEFAULT_MAX_STEPS)
from .odl_chain import build_odl_chain
from .tel_chain import build_tel_chain

_FLAG_OF_DEST = {"from_state": "--from", "to_state": "--to"}


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with code 1."""

    def error(self, message):  # noqa: D102 - argparse hook
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    """Parse '3', '3,5,7' or '3..10' into a tuple of ints."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(x) for x in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    values = tuple(float(x) for x in text.split(",") if x.strip())
    if not values:
        raise ValueError("empty grid")
    return values


def _controller(args, players: int, epsilon: float) -> ControllerParams:
    params = ControllerParams.defaults(players, epsilon, c=args.c)
    overrides = {k: getattr(args, k) for k in ("nu1", "nu2", "phi1", "phi2")
                 if getattr(args, k, None) is not None}
    return replace(params, **overrides) if overrides else params


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _algorithms(arg: str) -> tuple[str, ...]:
    return ("tel", "odl") if arg == "both" else (arg,)


def _methods(arg: str) -> tuple[str, ...]:
    return ("approx", "mc") if arg == "both" else (arg,)


def cmd_chain_build(args) -> int:
    params = _controller(args, args.players, args.epsilon)
    if args.algo == "tel":
        chain = build_tel_chain(args.players, args.resources, args.epsilon, params)
    else:
        chain = build_odl_chain(args.players, args.resources, args.epsilon,
                                params, accept_epsilon=args.accept_epsilon)
    report = verify_ergodic(chain.matrix)
    if not report.ergodic:
        print(f"error: built chain is not ergodic "
              f"({report.num_components} components, "
              f"{len(report.unreachable)} unreachable states)", file=sys.stderr)
        return 2
    _emit(chain.to_json() + "\n", args.out)
    print(f"{args.algo} chain: {len(chain)} states, ergodic", file=sys.stderr)
    return 0


def cmd_chain_analyze(args) -> int:
    chain = ApproxChain.load(args.chain)
    result = analyze(chain, args.from_state, args.to_state)
    row = {
        "algo": chain.algorithm, "K": chain.players, "N": chain.resources,
        "epsilon": chain.epsilon, "method": "approx",
        "efht": result.efht, "alpha": result.alpha, "seed": NA,
    }
    _emit(rows_to_csv([row], ANALYZE_COLUMNS), args.out)
    return 0


def cmd_simulate(args) -> int:
    rows = []
    for algo in _algorithms(args.algo):
        resources = args.resources if args.resources else args.players
        cell = resolve_cell(algo, args.players, resources, args.epsilon,
                            args.c, args.match_epsilon)
        if any(getattr(args, k) is not None for k in ("nu1", "nu2", "phi1", "phi2")):
            cell = replace(cell, controller=_controller(
                args, args.players, cell.controller.epsilon))
        rows.extend(mc_rows(cell, args.seed, args.trials, args.alpha_iters,
                            args.burn_in, args.max_steps))
    _emit(rows_to_csv(rows, CSV_COLUMNS), args.out)
    return 0


def cmd_sweep(args) -> int:
    spec = SweepSpec(
        algorithms=_algorithms(args.algo),
        players=args.players,
        epsilons=args.epsilon_grid,
        n_delta=args.n_delta,
        methods=_methods(args.method),
        match_epsilon=args.match_epsilon,
        c=args.c,
        seed=args.seed,
        efht_trials=args.trials,
        alpha_iterations=args.alpha_iters,
        burn_in=args.burn_in,
        max_steps=args.max_steps,
    )
    outcome = run_sweep(spec)
    _emit(rows_to_csv(outcome.rows, CSV_COLUMNS), args.out)
    if args.plot:
        if not args.out:
            print("error: --plot needs --out to place the figures",
                  file=sys.stderr)
            return 1
        from .plotting import render_sweep_figures
        for path in render_sweep_figures(outcome.rows, args.out):
            print(f"wrote {path}", file=sys.stderr)
    if outcome.failures:
        for note in outcome.failures:
            print(f"cell failed: {note}", file=sys.stderr)
        return 3
    return 0


def cmd_complexity(args) -> int:
    rows = complexity_rows(args.players, args.n_delta)
    _emit(rows_to_csv(rows, COMPLEXITY_COLUMNS), args.out)
    return 0


def _add_controller_flags(p) -> None:
    p.add_argument("--c", type=float, default=None,
                   help="ODL exploration exponent (default: number of players)")
    for name in ("nu1", "nu2", "phi1", "phi2"):
        p.add_argument(f"--{name}", type=float, default=None,
                       help=f"controller constant {name}")


def _add_mc_flags(p) -> None:
    p.add_argument("--trials", type=int, default=DEFAULT_EFHT_TRIALS,
                   help="hitting-time trials")
    p.add_argument("--alpha-iters", type=int, default=DEFAULT_ALPHA_ITERATIONS,
                   help="iterations of the stability trajectory")
    p.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN,
                   help="iterations dropped before stability counting")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS,
                   help="per-trial step cap (cap hits are censored)")
    p.add_argument("--seed", type=int, default=0, help="master seed")


def build_parser() -> _Parser:
    parser = _Parser(prog="telodl", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", default=None,
                        help="JSON file pre-filling flags (flags override)")
    sub = parser.add_subparsers(dest="command", required=True)

    chain = sub.add_parser("chain", help="build or analyze reduced chains")
    chain_sub = chain.add_subparsers(dest="chain_command", required=True)

    build = chain_sub.add_parser("build", help="build a chain, write JSON")
    build.add_argument("--algo", choices=("tel", "odl"), required=True)
    build.add_argument("--players", type=int, required=True)
    build.add_argument("--resources", type=int, required=True)
    build.add_argument("--epsilon", type=float, required=True,
                       help="experimentation probability of the chain model")
    build.add_argument("--accept-epsilon", type=float, default=None,
                       help="ODL accept/reject base when modelling c > 1 "
                            "(default: same as --epsilon)")
    _add_controller_flags(build)
    build.add_argument("--out", default=None)
    build.set_defaults(func=cmd_chain_build)

    an = chain_sub.add_parser("analyze", help="hitting time and stability")
    an.add_argument("--chain", required=True, help="chain JSON file")
    an.add_argument("--from", dest="from_state", default="full-collision",
                    help="source state name ('full-collision', 'orthogonal', "
                         "occupancies like '3,1,0', or a label)")
    an.add_argument("--to", dest="to_state", default="orthogonal",
                    help="target state name")
    an.add_argument("--out", default=None)
    an.set_defaults(func=cmd_chain_analyze)

    sim = sub.add_parser("simulate", help="Monte Carlo metric estimates")
    sim.add_argument("--algo", choices=("tel", "odl", "both"), required=True)
    sim.add_argument("--players", type=int, required=True)
    sim.add_argument("--resources", type=int, default=None,
                     help="default: same as --players")
    sim.add_argument("--epsilon", type=float, required=True,
                     help="controller epsilon (grid semantics as in sweep)")
    sim.add_argument("--match-epsilon", action="store_true",
                     help="treat --epsilon as the experimentation probability "
                          "for both algorithms (ODL runs at epsilon**(1/c))")
    _add_controller_flags(sim)
    _add_mc_flags(sim)
    sim.add_argument("--out", default=None)
    sim.set_defaults(func=cmd_simulate)

    sweep = sub.add_parser("sweep", help="grid sweep, CSV (and figures)")
    sweep.add_argument("--algo", choices=("tel", "odl", "both"), default="both")
    sweep.add_argument("--players", type=_int_list, required=True,
                       help="'3', '3,5,7' or '3..10'")
    sweep.add_argument("--n-delta", type=int, default=0,
                       help="resources = players + this surplus")
    sweep.add_argument("--epsilon-grid", type=_float_list, required=True,
                       help="comma-separated experimentation probabilities")
    sweep.add_argument("--match-epsilon", action="store_true",
                       help="grid values are experimentation probabilities "
                            "for both algorithms (TEL eps = ODL eps**c)")
    sweep.add_argument("--method", choices=("approx", "mc", "both"),
                       default="approx")
    _add_controller_flags(sweep)
    _add_mc_flags(sweep)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--plot", action="store_true",
                       help="render metric figures next to the CSV")
    sweep.set_defaults(func=cmd_sweep)

    comp = sub.add_parser("complexity", help="state-count table")
    comp.add_argument("--players", type=_int_list, required=True)
    comp.add_argument("--n-delta", type=int, default=0)
    comp.add_argument("--out", default=None)
    comp.set_defaults(func=cmd_complexity)
    return parser


def _apply_config(args, argv: list[str]) -> None:
    """Fill unset flags from the JSON config file; explicit flags win."""
    if not args.config:
        return
    config = json.loads(Path(args.config).read_text())
    if not isinstance(config, dict):
        raise ValueError("config file must hold a JSON object")
    for dest, value in config.items():
        if not hasattr(args, dest):
            continue
        flag = _FLAG_OF_DEST.get(dest, "--" + dest.replace("_", "-"))
        if flag in argv:
            continue
        if dest == "players" and isinstance(value, (list, str)) \
                and isinstance(getattr(args, dest), tuple):
            value = tuple(int(x) for x in
                          (_int_list(value) if isinstance(value, str) else value))
        elif dest == "epsilon_grid":
            if isinstance(value, str):
                value = _float_list(value)
            else:
                value = tuple(float(x) for x in value)
        setattr(args, dest, value)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config(args, argv)
        return args.func(args)
    except (ChainConstructionError, NumericalError, np.linalg.LinAlgError,
            RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
