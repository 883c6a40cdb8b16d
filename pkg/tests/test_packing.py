from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from hx.core import Hypergraph, PackingRecord, popcount, to_mask
from hx.errors import BadParameters
from hx.packing import (DIRECT, FAITHFUL, audit_packing, color_ksets, conflicts_with, default_epsilon,
                        degree_diagnostics, greedy_conflict_free_packing, minus_threshold, packing_density,
                        place, replay_conflict)
from hx.properties import is_induced_packing

PATH = Hypergraph.from_masks([to_mask(e) for e in ([0, 1], [1, 2], [2, 3])], 4, 2)
TRIANGLE = Hypergraph.from_masks([to_mask(e) for e in ([0, 1], [0, 2], [1, 2])], 3, 2)


def test_default_epsilon_in_range():
    assert default_epsilon(10, 2) == Fraction(1, 32)
    assert default_epsilon(10, 2) < Fraction(1, 2 * 8)


def test_coloring_rejects_bad_epsilon():
    with pytest.raises(BadParameters):
        color_ksets(10, 2, Fraction(3, 2), 0)


def test_coloring_is_order_independent():
    a = color_ksets(12, 2, Fraction(1, 3), 4)
    b = color_ksets(12, 2, Fraction(1, 3), 4)
    sets = [to_mask(c) for c in combinations(range(12), 2)]
    first = [a.is_red(s) for s in sets]
    second = [b.is_red(s) for s in reversed(sets)][::-1]
    assert first == second
    assert 0 < sum(first) < len(sets)


def test_empty_packing_when_n_below_m():
    rec = greedy_conflict_free_packing(PATH, 3, 2, 4, seed=1, budget=50)
    assert len(rec) == 0


def test_rejects_wrong_uniformity():
    with pytest.raises(BadParameters):
        greedy_conflict_free_packing(PATH, 10, 3, 4)


@pytest.mark.parametrize("strategy", [DIRECT, FAITHFUL])
@pytest.mark.parametrize("seed", range(4))
def test_packings_are_sound(strategy, seed):
    eps = Fraction(1, 10) if strategy == FAITHFUL else None
    rec = greedy_conflict_free_packing(PATH, 14, 2, 4, eps, strategy, seed=seed, budget=3000)
    assert is_induced_packing(rec).holds
    assert all(audit_packing(rec, 4).values())
    assert rec.flags["strategy"] == strategy


def test_faithful_copies_match_the_coloring():
    eps = Fraction(1, 5)
    rec = greedy_conflict_free_packing(TRIANGLE, 12, 2, 3, eps, FAITHFUL, seed=3, budget=4000)
    col = color_ksets(12, 2, eps, 3)
    assert len(rec) > 0
    for c in rec.copies:
        assert all(col.is_blue(e) for e in c.edges)


def test_epsilon_outside_proof_range_flagged():
    rec = greedy_conflict_free_packing(PATH, 10, 2, 4, Fraction(1, 2), FAITHFUL, seed=0, budget=100)
    assert rec.flags.get("epsilon_outside_proof_range")


def test_same_seed_same_packing():
    a = greedy_conflict_free_packing(PATH, 16, 2, 4, seed=9, budget=800)
    b = greedy_conflict_free_packing(PATH, 16, 2, 4, seed=9, budget=800)
    assert a.to_dict() == b.to_dict()


def test_target_count_stops_early():
    rec = greedy_conflict_free_packing(PATH, 20, 2, 4, seed=2, budget=5000, target_count=3)
    assert len(rec) == 3


def test_density_is_exact():
    rec = greedy_conflict_free_packing(PATH, 12, 2, 4, seed=1, budget=500)
    assert packing_density(rec) == Fraction(3 * len(rec), 66)


def _brute_conflict(cand, rec, e, m, k):
    """Any ell-subfamily (2 <= ell <= e) of accepted sets plus the candidate spanning too little."""
    sets = [c.vertices for c in rec.copies]
    for ell in range(2, e + 1):
        for sub in combinations(range(len(sets)), ell - 1):
            u = cand.vertices
            for i in sub:
                u |= sets[i]
            if popcount(u) <= minus_threshold(m, k, ell):
                return True
    return False


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(5, 8))
def test_conflict_search_matches_brute_scan(seed, accepted_count):
    # accept unconditionally (only edge-disjoint and induced), then probe a fresh candidate
    import random

    rng = random.Random(seed)
    n, m, k, e = 11, 4, 2, 4
    rec = PackingRecord(n, k, PATH)
    while len(rec) < accepted_count:
        cand = place(PATH, rng.sample(range(n), m))
        if conflicts_with(cand, rec, 2, m, k) is None:
            rec.copies.append(cand.as_copy())
    probe = place(PATH, rng.sample(range(n), m))
    found = conflicts_with(probe, rec, e, m, k)
    local = conflicts_with(probe, rec, 2, m, k)
    if local is None:
        assert (found is not None) == _brute_conflict(probe, rec, e, m, k)
    if found is not None:
        assert replay_conflict(probe, rec, found, m, k)


def test_degree_diagnostics_enumerates_small_cases():
    d = degree_diagnostics(TRIANGLE, 6, 2)
    assert d["mode"] == "exhaustive"
    assert d["placements"] == 120
    # every 2-set lies in the same number of placed triangles
    assert d["stats"]["max_over_mean"] == 1


def test_patience_stops_a_saturated_run():
    rec = greedy_conflict_free_packing(TRIANGLE, 8, 2, 3, seed=2, budget=5000, patience=50)
    assert rec.flags["stalled"] and not rec.flags["budget_exhausted"]
    assert rec.flags["samples"] < 5000
    assert all(audit_packing(rec, 3).values())


def test_larger_budget_extends_the_same_run():
    small = greedy_conflict_free_packing(PATH, 20, 2, 3, seed=6, budget=40, patience=None)
    large = greedy_conflict_free_packing(PATH, 20, 2, 3, seed=6, budget=400, patience=None)
    assert large.copies[:len(small.copies)] == small.copies
