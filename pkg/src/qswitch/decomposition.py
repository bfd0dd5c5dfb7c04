"""Decompose a fractional edge vector into a convex mixture of matchings.

The scheduler's LP emits a point x of the matching polytope; the policy
actually executed each slot is a random matching, so x has to be rewritten
as a finite convex combination sum_M p_M 1_M = x, sum_M p_M = 1. Columns
(matchings) are generated lazily:

  1. the restricted master is the phase-1 feasibility LP over the current
     column pool (artificial mass is minimized subject to the marginal and
     normalization rows);
  2. its duals (y on the edge rows, z on the normalization row) price new
     columns: the best candidate is an exact maximum-weight matching under
     edge weights y, with value W*;
  3. if W* > -z the candidate column has negative reduced cost, is provably
     new (every pooled column prices out at <= -z), and is added; otherwise
     the loop stops.

On termination with a feasible master, the pooled basic solution is the
mixture. On termination with positive artificial mass, (y, z) certify that
NO matching column can repair the master, i.e. x is outside the matching
polytope, and an error is raised. Exactness of the pricing oracle is what
makes that certificate (and termination itself) sound.

The returned atom probabilities are pruned below 1e-12, renormalized, and
ordered canonically; sampling consumes exactly one uniform draw per call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .matching import max_weight_matching
from .model import Edge, Matching, SwitchInstance, full_edge_vector
from .simplex import solve_feasibility

PRICING_TOL = 1e-9
FEASIBILITY_TOL = 1e-9
PRUNE_TOL = 1e-12


class DecompositionError(RuntimeError):
    pass


@dataclass(frozen=True)
class MixtureAtom:
    probability: float
    matching: Matching


@dataclass
class MatchingMixture:
    atoms: list[MixtureAtom]

    def __post_init__(self):
        total = sum(a.probability for a in self.atoms)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"atom probabilities sum to {total!r}, not 1")
        if any(a.probability <= 0.0 for a in self.atoms):
            raise ValueError("atom probabilities must be positive")

    def marginals(self, edges: Sequence[Edge]) -> dict[Edge, float]:
        out = {e: 0.0 for e in edges}
        for atom in self.atoms:
            for e in atom.matching:
                out[e] += atom.probability
        return out


def _sorted_atoms(pairs: list[tuple[float, Matching]]) -> list[MixtureAtom]:
    # canonical order: by sorted edge tuple, so mixtures (and sampling) do
    # not depend on column discovery order
    pairs.sort(key=lambda pm: tuple(sorted(pm[1])))
    return [MixtureAtom(probability=p, matching=m) for p, m in pairs]


def decompose(
    inst: SwitchInstance,
    x: Mapping[Edge, float],
    tol: float = PRICING_TOL,
    max_columns: int | None = None,
) -> MatchingMixture:
    """Column-generation decomposition of x over matchings of the graph.

    Raises DecompositionError("infeasible master at termination") when x is
    not in the matching polytope, and ("column cap exceeded") if the pool
    outgrows max_columns (default 10 |E|) without terminating, which a
    correct exact oracle never triggers.
    """
    xfull = full_edge_vector(inst, x)
    edges = list(inst.edges)
    ne = len(edges)
    cap = max_columns if max_columns is not None else 10 * max(ne, 1)

    pool: list[Matching] = [frozenset()]
    pool += [frozenset([e]) for e in edges if xfull[e] > 0.0]
    pool_set = set(pool)
    if len(pool) > cap:
        raise DecompositionError(f"column cap exceeded ({cap})")

    b = np.array([xfull[e] for e in edges] + [1.0])

    while True:
        A = np.zeros((ne + 1, len(pool)))
        for k, m in enumerate(pool):
            for e in m:
                A[inst.edge_index[e], k] = 1.0
            A[ne, k] = 1.0

        master = solve_feasibility(A, b)
        y = {e: float(master.duals[i]) for i, e in enumerate(edges)}
        z = float(master.duals[ne])

        priced = max_weight_matching(inst, y)
        if priced.weight <= -z + tol:
            if master.residual > FEASIBILITY_TOL:
                raise DecompositionError("infeasible master at termination")
            pairs = [
                (float(p), m)
                for p, m in zip(master.x, pool)
                if p > PRUNE_TOL
            ]
            total = sum(p for p, _ in pairs)
            pairs = [(p / total, m) for p, m in pairs]
            return MatchingMixture(atoms=_sorted_atoms(pairs))

        if priced.matching in pool_set:
            raise DecompositionError(
                "pricing returned a pooled column; dual prices are inconsistent"
            )
        pool.append(priced.matching)
        pool_set.add(priced.matching)
        if len(pool) > cap:
            raise DecompositionError(f"column cap exceeded ({cap})")


def sample_matching(mixture: MatchingMixture, rng: np.random.Generator) -> Matching:
    """Draw one matching; consumes exactly one uniform from rng."""
    u = rng.random()
    acc = 0.0
    for atom in mixture.atoms:
        acc += atom.probability
        if u < acc:
            return atom.matching
    return mixture.atoms[-1].matching
