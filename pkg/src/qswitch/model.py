"""Problem instances for entanglement-switch scheduling.

An instance is a simple undirected graph whose vertices hold entanglement
buffers and whose edges carry request queues. Per-vertex physics (arrival
probability, decoherence probability, buffer size) and per-edge demand
(request arrival law) are attached to the graph. Instances are validated
once and treated as immutable afterwards; every consumer may assume the
invariants checked by validate_instance.

Canonical orderings used throughout the package: vertices sorted by name,
edges stored as sorted (u, v) pairs and listed in sorted order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

Edge = tuple[str, str]
Matching = frozenset[Edge]

ARRIVAL_KINDS = ("bernoulli", "poisson")


class InvalidInstanceError(ValueError):
    """Raised by validate_instance; carries every violated invariant."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid instance:\n" + "\n".join(f"- {e}" for e in errors))


def canonical_edge(u: str, v: str) -> Edge:
    """Order an endpoint pair; self-loops are left to validation."""
    return (u, v) if u <= v else (v, u)


def edge_name(e: Edge) -> str:
    """Display label for an edge, used in CSV headers and traces."""
    return f"{e[0]}-{e[1]}"


@dataclass(frozen=True)
class NodeParams:
    """Per-vertex physics.

    arrival_prob: probability a new entanglement is delivered each slot.
    decoherence_prob: probability each stored entanglement is lost per slot.
    buffer: buffer capacity (levels live in 0..buffer).
    """

    arrival_prob: float
    decoherence_prob: float
    buffer: int


@dataclass(frozen=True)
class EdgeDemand:
    """Per-edge request arrival law.

    mean_rate is the per-slot mean; variance is recorded explicitly so
    downstream reports never have to re-derive it from the kind.
    """

    mean_rate: float
    variance: float
    arrival_kind: str = "bernoulli"


def default_variance(mean_rate: float, arrival_kind: str) -> float:
    if arrival_kind == "bernoulli":
        return mean_rate * (1.0 - mean_rate)
    return mean_rate


@dataclass(frozen=True)
class SwitchInstance:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    node_params: Mapping[str, NodeParams]
    edge_demand: Mapping[Edge, EdgeDemand]

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def incident(self) -> dict[str, tuple[Edge, ...]]:
        inc: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e[0]].append(e)
            inc[e[1]].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
            "node_params": {
                v: {
                    "lambda": p.arrival_prob,
                    "mu": p.decoherence_prob,
                    "buffer": p.buffer,
                }
                for v, p in self.node_params.items()
            },
            "edge_demand": [
                {
                    "edge": list(e),
                    "nu": d.mean_rate,
                    "sigma2": d.variance,
                    "arrival_kind": d.arrival_kind,
                }
                for e, d in self.edge_demand.items()
            ],
        }

    @staticmethod
    def from_dict(data: dict) -> "SwitchInstance":
        return build_instance(
            vertices=data.get("vertices", []),
            edges=[tuple(e) for e in data.get("edges", [])],
            node_params={
                v: NodeParams(
                    arrival_prob=p["lambda"],
                    decoherence_prob=p["mu"],
                    buffer=p["buffer"],
                )
                for v, p in data.get("node_params", {}).items()
            },
            edge_demand={
                tuple(rec["edge"]): EdgeDemand(
                    mean_rate=rec["nu"],
                    variance=rec.get(
                        "sigma2",
                        default_variance(rec["nu"], rec.get("arrival_kind", "bernoulli")),
                    ),
                    arrival_kind=rec.get("arrival_kind", "bernoulli"),
                )
                for rec in data.get("edge_demand", [])
            },
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "SwitchInstance":
        return SwitchInstance.from_dict(json.loads(text))


def build_instance(
    vertices: Iterable[str],
    edges: Iterable[tuple[str, str]],
    node_params: Mapping[str, NodeParams],
    edge_demand: Mapping[tuple[str, str], EdgeDemand] | None = None,
) -> SwitchInstance:
    """Canonicalize, validate, and freeze an instance.

    Edges missing from edge_demand get a zero-rate Bernoulli law, so
    scheduling-only uses need not spell out demand.
    """
    vs = tuple(sorted(vertices))
    es = tuple(sorted(canonical_edge(*e) for e in edges))
    demand_in = {canonical_edge(*e): d for e, d in (edge_demand or {}).items()}
    demand = {}
    for e in es:
        demand[e] = demand_in.pop(e, EdgeDemand(0.0, 0.0, "bernoulli"))
    # anything left in demand_in refers to a nonexistent edge; keep it so
    # validation can report it
    demand.update(demand_in)
    inst = SwitchInstance(
        vertices=vs, edges=es, node_params=dict(node_params), edge_demand=demand
    )
    validate_instance(inst)
    return inst


def validate_instance(inst: SwitchInstance) -> None:
    """Check every instance invariant; raise with the full violation list."""
    errors: list[str] = []

    seen = set()
    for v in inst.vertices:
        if not isinstance(v, str) or not v:
            errors.append(f"vertex name {v!r} is not a nonempty string")
        elif v in seen:
            errors.append(f"duplicate vertex {v!r}")
        seen.add(v)

    seen_edges = set()
    for e in inst.edges:
        u, v = e
        if u == v:
            errors.append(f"self-loop at {u!r}")
            continue
        if (u, v) != canonical_edge(u, v):
            errors.append(f"edge {e!r} is not in canonical (sorted) order")
        if u not in seen or v not in seen:
            errors.append(f"edge {e!r} references an undeclared vertex")
        if e in seen_edges:
            errors.append(f"duplicate edge {e!r}")
        seen_edges.add(e)

    for v in inst.vertices:
        if v not in inst.node_params:
            errors.append(f"missing node_params for vertex {v!r}")
    for v, p in inst.node_params.items():
        if v not in seen:
            errors.append(f"node_params for undeclared vertex {v!r}")
            continue
        if not 0.0 <= p.arrival_prob <= 1.0:
            errors.append(f"lambda for {v!r} must lie in [0, 1], got {p.arrival_prob}")
        if not 0.0 <= p.decoherence_prob <= 1.0:
            errors.append(f"mu for {v!r} must lie in [0, 1], got {p.decoherence_prob}")
        if not isinstance(p.buffer, int) or p.buffer < 1:
            errors.append(f"buffer for {v!r} must be an integer >= 1, got {p.buffer}")

    for e in inst.edges:
        if e not in inst.edge_demand:
            errors.append(f"missing edge_demand for edge {e!r}")
    for e, d in inst.edge_demand.items():
        if e not in seen_edges:
            errors.append(f"edge_demand for nonexistent edge {e!r}")
            continue
        if d.arrival_kind not in ARRIVAL_KINDS:
            errors.append(
                f"arrival_kind for {e!r} must be one of {ARRIVAL_KINDS}, got {d.arrival_kind!r}"
            )
        if d.mean_rate < 0.0:
            errors.append(f"nu for {e!r} must be >= 0, got {d.mean_rate}")
        elif d.arrival_kind == "bernoulli" and d.mean_rate > 1.0:
            errors.append(f"bernoulli nu for {e!r} must be <= 1, got {d.mean_rate}")
        if d.variance < 0.0:
            errors.append(f"sigma2 for {e!r} must be >= 0, got {d.variance}")

    if errors:
        raise InvalidInstanceError(errors)


def is_matching(inst: SwitchInstance, edges: Iterable[Edge]) -> bool:
    """True iff the edge set is a subset of E with pairwise disjoint endpoints."""
    used: set[str] = set()
    for e in edges:
        e = canonical_edge(*e)
        if e not in inst.edge_index:
            return False
        u, v = e
        if u in used or v in used:
            return False
        used.add(u)
        used.add(v)
    return True


def full_edge_vector(inst: SwitchInstance, values: Mapping[Edge, float]) -> dict[Edge, float]:
    """Extend a partial nonnegative edge map to all of E (zeros elsewhere).

    Rejects unknown edges and negative entries; the result is keyed in
    canonical edge order.
    """
    unknown = [e for e in values if canonical_edge(*e) not in inst.edge_index]
    if unknown:
        raise ValueError(f"values given for edges not in the graph: {sorted(unknown)}")
    out = {e: 0.0 for e in inst.edges}
    for e, val in values.items():
        out[canonical_edge(*e)] = float(val)
    negative = [e for e, val in out.items() if val < -1e-12]
    if negative:
        raise ValueError(f"negative values on edges: {sorted(negative)}")
    return {e: max(0.0, val) for e, val in out.items()}


def load_instance(path: str) -> SwitchInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return SwitchInstance.from_json(fh.read())


def dump_instance(inst: SwitchInstance, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(inst.to_json())
