"""
From LP point to per-slot schedule
==================================

An LP solution is a fractional edge vector; what runs each slot is one
matching. This walks the column-generation decomposition on a path graph
and then samples from the mixture to confirm the empirical edge marginals
come back out.
"""

import numpy as np

import qswitch as q

inst = q.build_instance(
    vertices=["a", "b", "c", "d"],
    edges=[("a", "b"), ("b", "c"), ("c", "d")],
    node_params={v: q.NodeParams(1.0, 0.0, 1) for v in "abcd"},
)
x = {("a", "b"): 0.7, ("b", "c"): 0.2, ("c", "d"): 0.5}

mix = q.decompose(inst, x)
print("target edge vector:", {q.edge_name(e): v for e, v in x.items()})
print()
print("mixture atoms:")
for atom in mix.atoms:
    label = "{" + ", ".join(q.edge_name(e) for e in sorted(atom.matching)) + "}"
    print(f"  p = {atom.probability:.6f}  {label}")
print()

marg = mix.marginals(inst.edges)
print("exact mixture marginals:", {q.edge_name(e): round(v, 9) for e, v in marg.items()})

rng = np.random.default_rng(7)
n = 100_000
counts = {e: 0 for e in inst.edges}
for _ in range(n):
    for e in q.sample_matching(mix, rng):
        counts[e] += 1
print(f"empirical marginals over {n} draws:")
for e in inst.edges:
    print(f"  {q.edge_name(e)}: {counts[e] / n:.4f}  (target {x[e]})")
print()

# a point outside the matching polytope is rejected with a certificate,
# not silently rounded
try:
    q.decompose(inst, {("a", "b"): 0.7, ("b", "c"): 0.6, ("c", "d"): 0.5})
except q.DecompositionError as exc:
    print("overloaded vertex b rejected:", exc)
