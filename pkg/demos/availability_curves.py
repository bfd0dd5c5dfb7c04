"""
Buffer size versus availability
===============================

Availability is the stationary chance a node's buffer is nonempty under the
single-node reference chain. It climbs with buffer size and saturates fast;
the gap to a large-buffer proxy decays geometrically. Prints the curves for
a few loads and the fitted decay rate.
"""

import qswitch as q

buffers = [1, 2, 3, 5, 8, 12, 17, 25]
rows = [
    (0.3, 0.015),  # light decoherence
    (0.3, 0.03),  # the usual bench point
    (0.5, 0.05),
]

header = "lambda   mu     " + "".join(f"B={b:<7}" for b in buffers)
print(header)
for lam, mu in rows:
    vals = [
        q.availability(q.ChainSpec(lam, mu, lam, b))
        for b in buffers
    ]
    print(f"{lam:<8} {mu:<6} " + "".join(f"{v:<9.5f}" for v in vals))
print()

prof = q.convergence_profile(
    arrival_prob=0.3,
    decoherence_prob=0.03,
    service_prob=0.3,
    buffers=list(range(5, 26)),
    reference_buffer=200,
)
print(f"gap to B=200 at lambda=0.3, mu=0.03 (C_ref = {prof.reference_availability:.9f}):")
for p in prof.points[::4]:
    print(f"  B={p.buffer:<3} gap={p.gap:.3e}")
print(
    f"log-gap decay: slope {prof.log_gap_slope:.4f} per buffer unit, "
    f"R^2 {prof.log_gap_r2:.4f} over {prof.fitted_points} points"
)
print()

# the coherence factor is the worst-edge version of the same quantity,
# and is what discounts the schedulable region
inst = q.build_instance(
    vertices=["a", "b", "c"],
    edges=[("a", "b"), ("a", "c"), ("b", "c")],
    node_params={v: q.NodeParams(0.3, 0.03, 10) for v in "abc"},
)
for policy in ("alg1", "alg2"):
    rep = q.coherence_factor(inst, policy)
    print(
        f"coherence factor ({policy}): {rep.gamma:.6f}"
        f"  [product form {rep.gamma_product:.6f}]"
    )
