import numpy as np
import pytest

import qswitch as q
from oracles import (
    best_matching_bruteforce,
    make_instance,
    matchings_bruteforce,
    random_graph,
)


def test_triangle_has_four_matchings(triangle):
    mats = q.enumerate_matchings(triangle)
    assert len(mats) == 4
    assert frozenset() in mats


def test_enumeration_matches_bruteforce_on_random_graphs():
    rng = np.random.default_rng(7)
    for _ in range(25):
        verts, edges = random_graph(rng, int(rng.integers(2, 7)))
        inst = make_instance(verts, edges)
        got = set(q.enumerate_matchings(inst))
        want = set(matchings_bruteforce(edges))
        assert got == want


def test_enumeration_rejects_large_graphs():
    verts = [f"u{i}" for i in range(21)] + [f"v{i}" for i in range(21)]
    edges = [(f"u{i}", f"v{i}") for i in range(21)]
    inst = make_instance(verts, edges)
    with pytest.raises(ValueError):
        q.enumerate_matchings(inst)


def test_max_weight_tie_breaks_lexicographically(triangle):
    res = q.max_weight_matching(triangle, {e: 1.0 for e in triangle.edges})
    assert res.matching == frozenset({("a", "b")})
    assert res.weight == 1.0


def test_negative_weights_prefer_empty():
    inst = make_instance(["a", "b"], [("a", "b")])
    res = q.max_weight_matching(inst, {("a", "b"): -2.0})
    assert res.matching == frozenset()
    assert res.weight == 0.0


def test_missing_weight_rejected(triangle):
    with pytest.raises(ValueError):
        q.max_weight_matching(triangle, {("a", "b"): 1.0})


def test_path_picks_outer_edges(path4):
    w = {("a", "b"): 1.0, ("b", "c"): 1.5, ("c", "d"): 1.0}
    res = q.max_weight_matching(path4, w)
    assert res.matching == frozenset({("a", "b"), ("c", "d")})
    assert res.weight == 2.0


def test_max_weight_exact_against_bruteforce():
    rng = np.random.default_rng(13)
    for _ in range(60):
        verts, edges = random_graph(rng, int(rng.integers(2, 8)))
        if not edges:
            continue
        inst = make_instance(verts, edges)
        weights = {e: float(rng.normal()) for e in edges}
        res = q.max_weight_matching(inst, weights)
        want_w, want_m = best_matching_bruteforce(edges, weights)
        assert res.weight == want_w
        assert tuple(sorted(res.matching)) == want_m
