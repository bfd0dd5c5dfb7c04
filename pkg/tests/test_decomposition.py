import numpy as np
import pytest

import qswitch as q
from oracles import make_instance, random_instance, random_mixture_point


def test_triangle_uniform_third_gives_three_singletons(triangle):
    mix = q.decompose(triangle, {e: 1.0 / 3.0 for e in triangle.edges})
    assert len(mix.atoms) == 3
    for atom in mix.atoms:
        assert len(atom.matching) == 1
        assert atom.probability == pytest.approx(1.0 / 3.0)
    got = {tuple(sorted(a.matching))[0] for a in mix.atoms}
    assert got == set(triangle.edges)


def test_triangle_uniform_half_is_outside(triangle):
    with pytest.raises(q.DecompositionError, match="infeasible master at termination"):
        q.decompose(triangle, {e: 0.5 for e in triangle.edges})


def test_marginals_reproduce_input(path4):
    x = {("a", "b"): 0.7, ("b", "c"): 0.2, ("c", "d"): 0.5}
    mix = q.decompose(path4, x)
    marg = mix.marginals(path4.edges)
    for e in path4.edges:
        assert marg[e] == pytest.approx(x[e], abs=1e-9)


def test_probabilities_sum_to_one(path4):
    mix = q.decompose(path4, {("a", "b"): 0.7, ("b", "c"): 0.2, ("c", "d"): 0.5})
    assert sum(a.probability for a in mix.atoms) == pytest.approx(1.0, abs=1e-12)
    assert all(a.probability > 0 for a in mix.atoms)


def test_atoms_sorted_canonically(path4):
    mix = q.decompose(path4, {("a", "b"): 0.7, ("b", "c"): 0.2, ("c", "d"): 0.5})
    keys = [tuple(sorted(a.matching)) for a in mix.atoms]
    assert keys == sorted(keys)


def test_zero_vector_decomposes_to_empty_matching(triangle):
    mix = q.decompose(triangle, {})
    assert len(mix.atoms) == 1
    assert mix.atoms[0].matching == frozenset()
    assert mix.atoms[0].probability == pytest.approx(1.0)


def test_vertex_saturation_is_caught():
    inst = make_instance(["a", "b", "c"], [("a", "b"), ("a", "c")])
    # vertex a carries total mass 1.2 > 1: no mixture exists
    with pytest.raises(q.DecompositionError, match="infeasible"):
        q.decompose(inst, {("a", "b"): 0.7, ("a", "c"): 0.5})


def test_column_cap_raises(triangle, path4):
    # cap below the initial pool
    with pytest.raises(q.DecompositionError, match="column cap exceeded"):
        q.decompose(triangle, {e: 1.0 / 3.0 for e in triangle.edges}, max_columns=1)
    # cap hit during column generation: singletons alone cannot express this
    # point (their probabilities would sum past 1), so a column must be priced in
    x = {("a", "b"): 0.7, ("b", "c"): 0.2, ("c", "d"): 0.5}
    with pytest.raises(q.DecompositionError, match="column cap exceeded"):
        q.decompose(path4, x, max_columns=4)
    assert q.decompose(path4, x, max_columns=5) is not None


def test_random_mixture_points_round_trip():
    rng = np.random.default_rng(43)
    done = 0
    while done < 25:
        inst = random_instance(rng, int(rng.integers(3, 7)))
        if not inst.edges:
            continue
        x, _ = random_mixture_point(rng, inst)
        mix = q.decompose(inst, x)
        marg = mix.marginals(inst.edges)
        for e in inst.edges:
            assert marg[e] == pytest.approx(x[e], abs=1e-8)
        done += 1


def test_points_outside_polytope_are_rejected():
    rng = np.random.default_rng(47)
    done = 0
    while done < 10:
        inst = random_instance(rng, int(rng.integers(3, 6)))
        if len(inst.edges) < 2:
            continue
        x, _ = random_mixture_point(rng, inst)
        # push one coordinate well past any convex combination
        e0 = inst.edges[0]
        x[e0] = x.get(e0, 0.0) + 1.1
        with pytest.raises((q.DecompositionError, ValueError)):
            q.decompose(inst, x)
        done += 1


def test_sampling_uses_one_draw_and_matches_probabilities(path4):
    x = {("a", "b"): 0.7, ("b", "c"): 0.2, ("c", "d"): 0.5}
    mix = q.decompose(path4, x)

    class CountingRng:
        def __init__(self, seed):
            self._rng = np.random.default_rng(seed)
            self.calls = 0

        def random(self):
            self.calls += 1
            return self._rng.random()

    rng = CountingRng(5)
    n = 200_000
    counts = {tuple(sorted(a.matching)): 0 for a in mix.atoms}
    for _ in range(n):
        m = q.sample_matching(mix, rng)
        counts[tuple(sorted(m))] += 1
    assert rng.calls == n
    for atom in mix.atoms:
        freq = counts[tuple(sorted(atom.matching))] / n
        # 4 sigma band on a binomial proportion
        sd = (atom.probability * (1 - atom.probability) / n) ** 0.5
        assert abs(freq - atom.probability) < 4 * sd + 1e-12


def test_mixture_validates_probability_mass():
    with pytest.raises(ValueError):
        q.MatchingMixture(atoms=[q.MixtureAtom(0.5, frozenset())])
    with pytest.raises(ValueError):
        q.MatchingMixture(
            atoms=[
                q.MixtureAtom(1.5, frozenset()),
                q.MixtureAtom(-0.5, frozenset([("a", "b")])),
            ]
        )
