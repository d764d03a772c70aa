"""Acceptance suite.

Each test implements one acceptance criterion end to end at its stated
tolerance and prints a PASS/FAIL line. Run with ``pytest
tests/test_acceptance.py -v -s`` to see the per-criterion lines.

Monte-Carlo-backed criteria pin their seeds and trial counts, so every
run is deterministic.
"""

import math
import subprocess
import sys

import numpy as np

import telodl as t
from telodl.analysis import analyze, oracle_hitting_time, verify_ergodic
from telodl.experiments import build_cell_chain, resolve_cell
from telodl.partitions import enumerate_rrc, up_neighbors

from oracles import build_full_chain, hitting_time_to_set, stationary_direct

SEED = 20240

GRID_PLAYERS = range(2, 9)
GRID_EPS = (1e-1, 1e-2, 1e-3)


def _report(number: int, ok: bool, detail: str) -> None:
    print(f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def _grid_chains():
    for players in GRID_PLAYERS:
        for resources in (players, players + 2):
            for eps in GRID_EPS:
                yield t.build_tel_chain(players, resources, eps)
                yield t.build_odl_chain(players, resources, eps)


def _fit_r2(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    r2 = 1.0 - ((y - pred) ** 2).sum() / ((y - y.mean()) ** 2).sum()
    return float(coef[0]), float(r2)


def test_criterion_1_exact_constants():
    ok = t.full_chain_size(4, 3, 3) == 373_248
    ok &= t.part(4, 2) == 2
    two_part = [r.s for r in enumerate_rrc(4, 4) if r.occupied == 2]
    ok &= two_part == [(3, 1, 0, 0), (2, 2, 0, 0)]
    ok &= t.part(4, 3) == 1
    three_part = [r.s for r in enumerate_rrc(4, 4) if r.occupied == 3]
    ok &= three_part == [(2, 1, 1, 0)]
    _report(1, ok, "exact state count 373248 and the partitions of 4 "
                   "into 2 and 3 parts")


def test_criterion_2_construction_invariants():
    worst_resid = 0.0
    checked = 0
    for chain in _grid_chains():
        checked += 1
        worst_resid = max(worst_resid, chain.max_row_sum_residual())
        assert chain.matrix.min() >= 0.0 and chain.matrix.max() <= 1.0
        assert verify_ergodic(chain.matrix).ergodic, chain.algorithm
        _assert_symmetric_set_reachability(chain)
    _report(2, worst_resid <= 1e-12,
            f"{checked} chains row-stochastic (worst residual "
            f"{worst_resid:.2e}), ergodic, symmetrically connected")


def _assert_symmetric_set_reachability(chain) -> None:
    blocks: dict[tuple[int, int], list[int]] = {}
    for idx, st in enumerate(chain.states):
        blocks.setdefault((st.n, st.i), []).append(idx)
    canon = {r.s: r for r in enumerate_rrc(chain.players, chain.resources)}
    for source in enumerate_rrc(chain.players, chain.resources):
        for _, raw in up_neighbors(source):
            upper = canon[raw.s]
            a = (source.occupied, source.index)
            b = (upper.occupied, upper.index)
            assert chain.matrix[np.ix_(blocks[a], blocks[b])].sum() > 0.0
            assert chain.matrix[np.ix_(blocks[b], blocks[a])].sum() > 0.0


def test_criterion_3_analytics_cross_oracle():
    worst_rel = 0.0
    worst_pi = 0.0
    for chain in _grid_chains():
        result = analyze(chain, "full-collision", "orthogonal")
        i = chain.resolve_state("full-collision")
        j = chain.resolve_state("orthogonal")
        reference = oracle_hitting_time(chain.matrix, i, j)
        worst_rel = max(worst_rel, abs(result.efht - reference) / reference)
        worst_pi = max(worst_pi, result.residuals.stationarity)
        assert result.alpha == result.pi[j]
    ok = worst_rel <= 1e-8 and worst_pi <= 1e-9
    _report(3, ok, f"hitting times agree with the first-step oracle to "
                   f"{worst_rel:.2e} relative; stationarity residual "
                   f"{worst_pi:.2e}; alpha = pi[target]")


def test_criterion_4_small_instance_ground_truth():
    eps = 1e-2
    details = []
    ok = True
    for algo in ("tel", "odl"):
        params = t.ControllerParams.defaults(2, eps, c=1)
        start = t.initial_collision_state(2, 2)
        states, index, P = build_full_chain(start, params, algo)
        assert verify_ergodic(P).ergodic
        targets = {i for i, s in enumerate(states)
                   if len(set(s.actions)) == 2}
        exact_efht = hitting_time_to_set(P, index[start], targets)
        pi = stationary_direct(P)
        exact_alpha = sum(pi[i] for i, s in enumerate(states)
                          if len(set(s.actions)) == 2 and s.is_rc)

        config = t.MonteCarloConfig(algo, 2, 2, params, seed=SEED,
                                    efht_trials=5000,
                                    alpha_iterations=10 ** 6)
        mc_efht = t.estimate_efht(config)
        mc_alpha = t.estimate_alpha(config)
        z_e = abs(mc_efht.mean - exact_efht) / mc_efht.std_error
        z_a = abs(mc_alpha.alpha - exact_alpha) / mc_alpha.std_error

        build = t.build_tel_chain if algo == "tel" else t.build_odl_chain
        approx = analyze(build(2, 2, eps), "full-collision", "orthogonal")
        ratio = approx.efht / exact_efht

        ok &= z_e <= 3.0 and z_a <= 3.0 and 0.5 <= ratio <= 2.0
        details.append(f"{algo}: z_efht={z_e:.2f} z_alpha={z_a:.2f} "
                       f"approx/exact={ratio:.3f}")
    _report(4, ok, "; ".join(details))


def test_criterion_5_approximation_tracks_monte_carlo():
    eps_grid = (5e-2, 2e-2, 1e-2)
    trials = 4000
    details = []
    ok = True
    for algo in ("tel", "odl"):
        previous = None
        for eps in eps_grid:
            cell = resolve_cell(algo, 3, 3, eps, None, True)
            approx = analyze(build_cell_chain(cell),
                             "full-collision", "orthogonal")
            config = t.MonteCarloConfig(algo, 3, 3, cell.controller,
                                        seed=SEED, efht_trials=trials,
                                        alpha_iterations=1, burn_in=0)
            mc = t.estimate_efht(config)
            rel = abs(approx.efht - mc.mean) / mc.mean
            sigma = approx.efht / mc.mean ** 2 * mc.std_error
            ok &= rel <= 0.5
            if previous is not None:
                # non-increasing up to three combined standard errors
                ok &= rel <= previous[0] + 3.0 * (sigma + previous[1])
            previous = (rel, sigma)
            details.append(f"{algo}@{eps:g}:{rel:.3f}")
    _report(5, ok, "relative EFHT errors " + " ".join(details)
            + " (all <= 0.5, non-increasing within confidence)")


def test_criterion_6_epsilon_trends():
    eps_grid = [10 ** (-x) for x in (1.5, 1.875, 2.25, 2.625, 3.0)]
    efhts, alphas = [], []
    for eps in eps_grid:
        result = analyze(t.build_tel_chain(3, 3, eps),
                         "full-collision", "orthogonal")
        efhts.append(result.efht)
        alphas.append(result.alpha)
    slope_e, r2_e = _fit_r2([math.log(1 / e) for e in eps_grid],
                            [math.log(v) for v in efhts])
    slope_a, r2_a = _fit_r2([math.log(e) for e in eps_grid],
                            [math.log(1 - a) for a in alphas])
    efht_increasing = all(b > a for a, b in zip(efhts, efhts[1:]))
    instability_shrinking = all(b > a for a, b in zip(alphas, alphas[1:]))
    ok = (efht_increasing and slope_e > 0 and r2_e >= 0.9
          and slope_a > 0 and r2_a >= 0.9 and instability_shrinking)
    _report(6, ok, f"log EFHT vs log 1/eps affine (R2={r2_e:.4f}, "
                   f"slope={slope_e:.2f}); log(1-alpha) vs log eps affine "
                   f"(R2={r2_a:.4f}, slope={slope_a:.2f})")


def test_criterion_7_growth_in_players():
    matched = 1e-3
    players = list(range(3, 11))
    efht = {"tel": [], "odl": []}
    alpha = {"tel": [], "odl": []}
    for algo in ("tel", "odl"):
        for k in players:
            cell = resolve_cell(algo, k, k, matched, None, True)
            result = analyze(build_cell_chain(cell),
                             "full-collision", "orthogonal")
            efht[algo].append(result.efht)
            alpha[algo].append(result.alpha)
    slope_tel, r2_tel = _fit_r2([math.log(k) for k in players],
                                [math.log(v) for v in efht["tel"]])
    slope_odl, r2_odl = _fit_r2(players,
                                [math.log(v) for v in efht["odl"]])
    stability = all(a > b for a, b in zip(alpha["tel"], alpha["odl"]))
    ok = (r2_tel >= 0.9 and slope_tel > 0
          and r2_odl >= 0.9 and slope_odl > 0 and stability)
    _report(7, ok, f"TEL polynomial in K (log-log R2={r2_tel:.4f}), "
                   f"ODL exponential in K (semilog R2={r2_odl:.4f}), "
                   f"TEL more stable at every K")


def test_criterion_8_resource_surplus_helps():
    details = []
    ok = True
    for algo in ("tel", "odl"):
        values = {}
        for resources in (3, 5):
            cell = resolve_cell(algo, 3, resources, 1e-2, None, True)
            result = analyze(build_cell_chain(cell),
                             "full-collision", "orthogonal")
            values[resources] = result
        ok &= values[5].efht < values[3].efht
        ok &= values[5].alpha > values[3].alpha
        details.append(f"{algo}: EFHT {values[3].efht:.1f}->"
                       f"{values[5].efht:.1f}, alpha {values[3].alpha:.3f}->"
                       f"{values[5].alpha:.3f}")
    _report(8, ok, "; ".join(details))


def test_criterion_9_cli_byte_determinism(tmp_path):
    commands = [
        ["simulate", "--algo", "both", "--players", "3", "--epsilon", "0.05",
         "--c", "1", "--trials", "200", "--alpha-iters", "20000",
         "--burn-in", "100", "--seed", "99"],
        ["sweep", "--algo", "both", "--players", "2,3", "--epsilon-grid",
         "0.1,0.05", "--method", "both", "--trials", "100",
         "--alpha-iters", "5000", "--burn-in", "50", "--seed", "4"],
        ["chain", "build", "--algo", "odl", "--players", "4", "--resources",
         "6", "--epsilon", "0.01"],
    ]
    ok = True
    for command in commands:
        outputs = []
        for _ in range(2):
            proc = subprocess.run([sys.executable, "-m", "telodl.cli",
                                   *command], capture_output=True)
            assert proc.returncode == 0, proc.stderr.decode()
            outputs.append(proc.stdout)
        ok &= outputs[0] == outputs[1]
    _report(9, ok, f"{len(commands)} CLI commands byte-identical "
                   "across repeated runs")
