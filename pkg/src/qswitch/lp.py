"""Scheduling LPs over the matching polytope.

Two relaxations are offered. The cutting-plane route (solve_algorithm1)
maximizes the weighted rate subject to per-vertex arrival caps and lazily
added odd-set constraints, separated exactly by enumeration; on the graph
sizes this package targets (separation capped at 20 vertices) the final
iterate satisfies every odd-set inequality, i.e. it is a point of the
capped matching polytope. The scaled route (solve_algorithm2) solves the
degree-only relaxation once and returns two thirds of it, which is always
inside the polytope: for any odd set S, summing the degree caps over S bounds
the mass inside S by |S|/2, and (2/3) |S|/2 <= (|S|-1)/2 whenever |S| >= 3.

Weights may be any reals (queue lengths in the simulator, arbitrary vectors
in tests); zero- and negative-weight edges stay in the LP so the solution
vector always covers every edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .model import Edge, SwitchInstance
from .simplex import SimplexError, solve_max_inequalities

SEPARATION_TOL = 1e-9
GAP_TOL = 1e-9
DEFAULT_VERTEX_CAP = 20


@dataclass(frozen=True)
class BlossomCut:
    """Odd-set constraint: total mass inside odd_set <= (|odd_set| - 1) / 2."""

    odd_set: frozenset[str]
    rhs: float


def blossom_cut(vertices) -> BlossomCut:
    s = frozenset(vertices)
    return BlossomCut(odd_set=s, rhs=(len(s) - 1) / 2.0)


@dataclass(frozen=True)
class BlossomViolation:
    cut: BlossomCut
    lhs: float

    @property
    def violation(self) -> float:
        return self.lhs - self.cut.rhs


@dataclass
class LpProblem:
    objective: dict[Edge, float]
    degree_caps: dict[str, float]
    cuts: list[BlossomCut] = field(default_factory=list)


@dataclass
class LpSolution:
    x: dict[Edge, float]
    objective_value: float
    active_cuts: list[BlossomCut]
    objective_trace: list[float]  # optimum after each cutting-plane round
    duality_gap: float


def validate_problem(prob: LpProblem) -> None:
    errors = []
    verts = set(prob.degree_caps)
    for e in prob.objective:
        u, v = e
        if u == v:
            errors.append(f"self-loop {e!r} in objective")
        if not u <= v:
            errors.append(f"edge {e!r} not in canonical order")
        if u not in verts or v not in verts:
            errors.append(f"edge {e!r} references a vertex without a degree cap")
    for v, cap in prob.degree_caps.items():
        if cap < 0.0:
            errors.append(f"degree cap for {v!r} must be >= 0, got {cap}")
    for cut in prob.cuts:
        k = len(cut.odd_set)
        if k < 3 or k % 2 == 0:
            errors.append(f"cut over {sorted(cut.odd_set)} is not an odd set of size >= 3")
        if cut.rhs != (k - 1) / 2.0:
            errors.append(f"cut over {sorted(cut.odd_set)} has rhs {cut.rhs}, expected {(k - 1) / 2.0}")
        if not cut.odd_set <= verts:
            errors.append(f"cut over {sorted(cut.odd_set)} leaves the vertex set")
    if errors:
        raise ValueError("invalid LP problem:\n" + "\n".join(f"- {e}" for e in errors))


def solve_lp(prob: LpProblem) -> LpSolution:
    """Solve the relaxation as posed (degree caps plus recorded cuts).

    The simplex runs on weights normalized to unit max magnitude so the
    duality-gap certificate is meaningful at any caller scale; the reported
    objective is for the original weights.
    """
    validate_problem(prob)
    edges = sorted(prob.objective)
    verts = sorted(prob.degree_caps)
    n = len(edges)
    m = len(verts) + len(prob.cuts)

    w = np.array([prob.objective[e] for e in edges], dtype=float)
    A = np.zeros((m, n))
    b = np.empty(m)
    vidx = {v: i for i, v in enumerate(verts)}
    for j, (u, v) in enumerate(edges):
        A[vidx[u], j] = 1.0
        A[vidx[v], j] = 1.0
    for i, v in enumerate(verts):
        b[i] = prob.degree_caps[v]
    for k, cut in enumerate(prob.cuts):
        row = len(verts) + k
        for j, e in enumerate(edges):
            if e[0] in cut.odd_set and e[1] in cut.odd_set:
                A[row, j] = 1.0
        b[row] = cut.rhs

    scale = max(1.0, float(np.max(np.abs(w))) if n else 1.0)
    res = solve_max_inequalities(w / scale, A, b)

    gap = abs(res.objective - float(res.duals @ b))
    if gap > GAP_TOL:
        raise SimplexError(f"duality gap {gap:.3e} exceeds {GAP_TOL}")

    x = np.maximum(res.x, 0.0)
    slack = b - A @ x
    if n and slack.min() < -SEPARATION_TOL:
        raise SimplexError(f"constraint violated by {-slack.min():.3e}")

    value = float(w @ x)
    return LpSolution(
        x={e: float(x[j]) for j, e in enumerate(edges)},
        objective_value=value,
        active_cuts=list(prob.cuts),
        objective_trace=[value],
        duality_gap=gap * scale,
    )


def separate_blossom(
    inst: SwitchInstance,
    x: Mapping[Edge, float],
    tol: float = SEPARATION_TOL,
    max_vertices: int = DEFAULT_VERTEX_CAP,
) -> BlossomViolation | None:
    """Exact odd-set separation by subset enumeration.

    Returns a most-violated odd set (ties broken deterministically by the
    subset's bitmask under the sorted vertex order) or None when every
    odd-set inequality holds within tol. Enumeration is exponential in the
    vertex count, hence the cap.
    """
    verts = inst.vertices
    nv = len(verts)
    if nv > max_vertices:
        raise ValueError(f"separation capped at {max_vertices} vertices, instance has {nv}")
    if nv < 3:
        return None

    vbit = {v: 1 << i for i, v in enumerate(verts)}
    masks = np.arange(1 << nv, dtype=np.int64)
    sizes = np.bitwise_count(masks)

    lhs = np.zeros(1 << nv)
    for e in inst.edges:
        xe = float(x.get(e, 0.0))
        if xe == 0.0:
            continue
        em = vbit[e[0]] | vbit[e[1]]
        lhs[(masks & em) == em] += xe

    rhs = (sizes - 1) / 2.0
    viol = lhs - rhs
    viol[(sizes < 3) | (sizes % 2 == 0)] = -np.inf

    best = int(np.argmax(viol))
    if viol[best] <= tol:
        return None
    odd = frozenset(v for v in verts if vbit[v] & best)
    return BlossomViolation(cut=blossom_cut(odd), lhs=float(lhs[best]))


def degree_problem(inst: SwitchInstance, weights: Mapping[Edge, float]) -> LpProblem:
    missing = [e for e in inst.edges if e not in weights]
    if missing:
        raise ValueError(f"weights missing for edges: {missing}")
    return LpProblem(
        objective={e: float(weights[e]) for e in inst.edges},
        degree_caps={v: inst.node_params[v].arrival_prob for v in inst.vertices},
    )


def solve_algorithm1(
    inst: SwitchInstance,
    weights: Mapping[Edge, float],
    tol: float = SEPARATION_TOL,
    max_vertices: int = DEFAULT_VERTEX_CAP,
) -> LpSolution:
    """Cutting-plane optimum over the capped matching polytope.

    Starts from the degree-cap relaxation and alternates solve / exact
    separation, adding one most-violated odd-set cut per round. Each added
    cut is honored to tolerance by the next solve, so no cut repeats and the
    loop terminates (there are finitely many odd sets); the objective trace
    is non-increasing.
    """
    prob = degree_problem(inst, weights)
    trace: list[float] = []
    # every odd set can be added at most once
    max_rounds = 2 ** max(0, len(inst.vertices) - 1) + 1
    for _ in range(max_rounds):
        sol = solve_lp(prob)
        trace.append(sol.objective_value)
        found = separate_blossom(inst, sol.x, tol=tol, max_vertices=max_vertices)
        if found is None:
            sol.objective_trace = trace
            return sol
        if any(c.odd_set == found.cut.odd_set for c in prob.cuts):
            raise SimplexError(
                f"separation returned an already-added cut {sorted(found.cut.odd_set)}"
            )
        prob.cuts.append(found.cut)
    raise SimplexError("cutting-plane round limit exceeded")


def solve_algorithm2(
    inst: SwitchInstance, weights: Mapping[Edge, float]
) -> LpSolution:
    """Degree-only relaxation scaled by 2/3.

    The scaled point always satisfies every odd-set inequality (see module
    docstring), so it lies in the capped matching polytope without any
    separation work; the price is the 2/3 factor on the objective.
    """
    sol = solve_lp(degree_problem(inst, weights))
    x_app = {e: (2.0 / 3.0) * val for e, val in sol.x.items()}
    value = sum(weights[e] * x_app[e] for e in sorted(x_app))
    return LpSolution(
        x=x_app,
        objective_value=float(value),
        active_cuts=[],
        objective_trace=sol.objective_trace + [float(value)],
        duality_gap=sol.duality_gap,
    )
