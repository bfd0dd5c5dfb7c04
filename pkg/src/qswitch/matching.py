"""Exact maximum-weight matching by branch and bound.

The scheduler's column generation prices candidate columns with a max-weight
matching oracle, and its termination argument is only sound if that oracle is
exact. Graphs here are desk scale (tens of edges), so an exhaustive search
with pruning is both simpler and more trustworthy than an optimized blossom
implementation.

Determinism contract: among all optimal matchings, the one whose sorted edge
tuple is lexicographically smallest under the canonical edge order is
returned. The empty matching is always a candidate, so the returned weight is
never negative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .model import Edge, Matching, SwitchInstance


@dataclass(frozen=True)
class MatchingResult:
    matching: Matching
    weight: float


def enumerate_matchings(inst: SwitchInstance, max_edges: int = 20) -> list[Matching]:
    """All matchings of the graph, the empty one included.

    Depth-first over the canonical edge order; the count is exponential, so
    the edge count is capped (default 20).
    """
    edges = inst.edges
    if len(edges) > max_edges:
        raise ValueError(
            f"graph has {len(edges)} edges; enumeration is capped at {max_edges}"
        )
    out: list[Matching] = []
    chosen: list[Edge] = []

    def extend(start: int, used: frozenset[str]) -> None:
        out.append(frozenset(chosen))
        for j in range(start, len(edges)):
            u, v = edges[j]
            if u in used or v in used:
                continue
            chosen.append(edges[j])
            extend(j + 1, used | {u, v})
            chosen.pop()

    extend(0, frozenset())
    return out


def max_weight_matching(
    inst: SwitchInstance, weights: Mapping[Edge, float]
) -> MatchingResult:
    """Exact maximum-weight matching under the given edge weights.

    weights must cover every edge. Edges with negative weight can never be
    part of an optimum (dropping one strictly improves the weight) and are
    pruned before the search; zero-weight edges stay, and ties among optima
    are broken toward the lexicographically smallest sorted edge tuple.
    """
    missing = [e for e in inst.edges if e not in weights]
    if missing:
        raise ValueError(f"weights missing for edges: {missing}")

    cands = [e for e in inst.edges if weights[e] >= 0.0]
    w = [float(weights[e]) for e in cands]

    # suffix[j] = total positive weight available from candidate j onward,
    # used as an (optimistic) upper bound for pruning
    suffix = [0.0] * (len(cands) + 1)
    for j in range(len(cands) - 1, -1, -1):
        suffix[j] = suffix[j + 1] + w[j]

    best_weight = 0.0
    best_edges: tuple[Edge, ...] = ()

    # slack keeps float rounding in the suffix bound from ever pruning an
    # optimal completion; ties (and near-ties) are always explored
    slack = 1e-9 * (1.0 + suffix[0])

    chosen: list[Edge] = []

    def search(start: int, used: frozenset[str], weight: float) -> None:
        nonlocal best_weight, best_edges
        cur = tuple(chosen)
        if weight > best_weight or (weight == best_weight and cur < best_edges):
            best_weight = weight
            best_edges = cur
        for j in range(start, len(cands)):
            # candidates beyond j only have smaller suffix bounds, so once
            # the bound drops below the incumbent nothing further down this
            # level can win
            if weight + suffix[j] < best_weight - slack:
                break
            u, v = cands[j]
            if u in used or v in used:
                continue
            chosen.append(cands[j])
            search(j + 1, used | {u, v}, weight + w[j])
            chosen.pop()

    search(0, frozenset(), 0.0)
    return MatchingResult(matching=frozenset(best_edges), weight=best_weight)
