"""Tests for the four-mood reduced chain builder."""

import numpy as np
import pytest

from telodl.analysis import verify_ergodic
from telodl.chain import ApproxChain, ChainConstructionError, StateKind
from telodl.game import ControllerParams
from telodl.partitions import OrderedRepartition, enumerate_rrc, occupancy, part
from telodl.tel_chain import (build_tel_chain, tel_down_row, tel_intra_row,
                              tel_state_set, tel_up_row)

from oracles import tel_expected_matrix

Z, X0, X1, X2, X3, X4 = (StateKind.RRC, StateKind.XI0, StateKind.XI1,
                         StateKind.XI2, StateKind.XI3, StateKind.XI4)


def rep(*parts):
    return OrderedRepartition(tuple(parts))


def p_any(eps, k):
    return 1.0 - (1.0 - eps) ** k


class TestStateSet:
    def test_fully_interfered_keeps_only_aligned(self):
        assert tel_state_set(rep(3, 0, 0)) == [Z]

    def test_single_alone_pairs_shape_drops_hopeful(self):
        # (2,1,0): nothing can feed the hopeful state, so it is omitted.
        assert tel_state_set(rep(2, 1, 0)) == [Z, X1, X2]
        assert tel_state_set(rep(2, 2, 1, 0, 0)) == [Z, X1, X2]

    def test_single_alone_with_heavy_cluster_keeps_hopeful(self):
        assert tel_state_set(rep(3, 1, 0, 0)) == [Z, X0, X1, X2]

    def test_two_alone_players_full_ladder(self):
        assert tel_state_set(rep(1, 1, 1)) == [Z, X0, X1, X2, X3, X4]
        assert tel_state_set(rep(1, 1)) == [Z, X0, X1, X2, X3, X4]

    def test_state_count_examples(self):
        assert len(build_tel_chain(3, 3, 0.1)) == 10
        # (2,0) contributes one state, (1,1) all six.
        assert len(build_tel_chain(2, 2, 0.1)) == 7

    def test_size_bound(self):
        for players in range(2, 9):
            chain = build_tel_chain(players, players, 0.1)
            bound = 6 * sum(part(players, n) for n in range(1, players + 1))
            assert len(chain) <= bound


class TestRowFormulas:
    def test_aligned_to_watchful(self):
        r = rep(2, 1, 0)
        rows = dict(((s, d), p) for s, d, p in
                    tel_intra_row(r, occupancy(r), 0.1, 3, 3, 1 / 6))
        expected = p_any(0.1, 3) * (2 / 3) * (1 / 2)
        assert rows[(Z, X1)] == pytest.approx(expected)
        assert expected == pytest.approx(0.0903333, abs=1e-6)

    def test_discontent_to_aligned(self):
        r = rep(2, 1, 0)
        rows = dict(((s, d), p) for s, d, p in
                    tel_intra_row(r, occupancy(r), 0.1, 3, 3, 1 / 6))
        assert rows[(X2, Z)] == pytest.approx(2 / 3)

    def test_certain_transitions(self):
        r = rep(1, 1, 1)
        rows = dict(((s, d), p) for s, d, p in
                    tel_intra_row(r, occupancy(r), 0.1, 3, 3, 1 / 6))
        assert rows[(X3, X4)] == 1.0
        assert rows[(X0, Z)] == 1.0

    def test_second_interference_overrides_single_experiment_rule(self):
        r = rep(2, 1, 0)
        rows = dict(((s, d), p) for s, d, p in
                    tel_intra_row(r, occupancy(r), 0.1, 3, 3, 1 / 6))
        assert rows[(X1, X2)] == pytest.approx(p_any(0.1, 2) / 2)
        assert rows[(X1, Z)] == pytest.approx(1 - p_any(0.1, 2) / 2)

    def test_up_from_heavy_cluster_goes_to_aligned(self):
        r = rep(3, 0, 0)
        (src, dst, p), = tel_up_row(r, occupancy(r), 3, 0.1, 3, 3)
        assert (src, dst) == (Z, Z)
        assert p == pytest.approx(p_any(0.1, 3))

    def test_up_from_pair_leaves_hopeful_partner(self):
        r = rep(2, 1, 0)
        (src, dst, p), = tel_up_row(r, occupancy(r), 2, 0.1, 3, 3)
        assert (src, dst) == (Z, X0)
        assert p == pytest.approx(p_any(0.1, 3) * (2 / 3) * (1 / 2))

    def test_down_merging_into_heavy_cluster(self):
        source = rep(2, 1, 0)  # one level above (3,0,0)
        rows = tel_down_row(source, occupancy(source), 2, 0.01, 3, 3, 1 / 6)
        assert rows == [(X2, Z, pytest.approx((1 / 3) * 0.01 ** (1 / 6)))]

    def test_down_remerging_two_singles(self):
        source = rep(1, 1, 1)  # one level above (2,1,0)
        rows = dict(((s, d), p) for s, d, p in
                    tel_down_row(source, occupancy(source), 1, 0.01, 3, 3, 1 / 6))
        assert rows[(X4, Z)] == pytest.approx(0.01 ** (1 / 6) / 3)
        assert (X2, Z) not in rows

    def test_negative_residue_rejected(self):
        r = rep(1, 1)
        with pytest.raises(ChainConstructionError):
            # An impossible recovery exponent drives the pair-state row
            # total above one.
            tel_intra_row(r, occupancy(r), 0.9, 2, 2, -40.0)


class TestBuiltChain:
    def test_matches_independent_rederivation(self):
        for players in range(2, 7):
            for resources in (players, players + 2):
                for eps in (0.4, 0.2, 0.1, 0.05, 0.025, 0.0125):
                    chain = build_tel_chain(players, resources, eps)
                    expected = tel_expected_matrix(players, resources, eps)
                    assert np.abs(chain.matrix - expected).max() <= 1e-12

    def test_construction_invariants_on_grid(self):
        for players in range(2, 9):
            for resources in (players, players + 2):
                for eps in (0.1, 0.01, 0.001):
                    chain = build_tel_chain(players, resources, eps)
                    assert chain.max_row_sum_residual() <= 1e-12
                    assert chain.matrix.min() >= 0.0
                    assert chain.matrix.max() <= 1.0
                    assert verify_ergodic(chain.matrix).ergodic

    def test_custom_recovery_exponent_enters_matrix(self):
        params = ControllerParams(epsilon=0.1, nu1=0.48, nu2=0.49,
                                  phi1=0.05, phi2=0.1, c=3.0)
        chain = build_tel_chain(3, 3, 0.1, params)
        expected = tel_expected_matrix(3, 3, 0.1, down_exponent=0.1)
        assert np.abs(chain.matrix - expected).max() <= 1e-12

    def test_symmetric_set_reachability(self):
        chain = build_tel_chain(5, 5, 0.05)
        blocks = _set_blocks(chain)
        for rep_a in enumerate_rrc(5, 5):
            for _, target in __import__("telodl").partitions.up_neighbors(rep_a):
                a = (rep_a.occupied, rep_a.index)
                b = _canonical_key(target, 5, 5)
                up = chain.matrix[np.ix_(blocks[a], blocks[b])].sum()
                down = chain.matrix[np.ix_(blocks[b], blocks[a])].sum()
                assert up > 0.0 and down > 0.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            build_tel_chain(1, 1, 0.1)
        with pytest.raises(ValueError):
            build_tel_chain(4, 3, 0.1)
        with pytest.raises(ValueError):
            build_tel_chain(3, 3, 0.0)

    def test_json_round_trip(self, tmp_path):
        chain = build_tel_chain(3, 3, 0.01)
        path = tmp_path / "chain.json"
        chain.save(path)
        loaded = ApproxChain.load(path)
        assert loaded.algorithm == "tel"
        assert loaded.players == 3 and loaded.resources == 3
        assert loaded.epsilon == 0.01
        assert [s.label for s in loaded.states] == [s.label for s in chain.states]
        assert np.array_equal(loaded.matrix, chain.matrix)
        assert loaded.resolve_state("orthogonal") == \
            chain.resolve_state("orthogonal")


def _set_blocks(chain):
    blocks: dict[tuple[int, int], list[int]] = {}
    for idx, st in enumerate(chain.states):
        blocks.setdefault((st.n, st.i), []).append(idx)
    return blocks


def _canonical_key(target, players, resources):
    canon = {r.s: r for r in enumerate_rrc(players, resources)}
    t = canon[target.s]
    return (t.occupied, t.index)
