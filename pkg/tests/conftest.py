import sys
from pathlib import Path

import pytest

import qswitch as q

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def triangle():
    """Three vertices, three edges, uniform caps at 1."""
    return q.build_instance(
        vertices=["a", "b", "c"],
        edges=[("a", "b"), ("a", "c"), ("b", "c")],
        node_params={v: q.NodeParams(1.0, 0.0, 1) for v in "abc"},
    )


@pytest.fixture
def path4():
    """Path on four vertices: a-b-c-d."""
    return q.build_instance(
        vertices=["a", "b", "c", "d"],
        edges=[("a", "b"), ("b", "c"), ("c", "d")],
        node_params={v: q.NodeParams(1.0, 0.0, 1) for v in "abcd"},
    )


@pytest.fixture
def stability_triangle():
    """Triangle tuned so the uniform policy has slack: the load fixture."""
    lam, mu, B = 0.3, 0.03, 10
    nu = 0.046245335743080325
    return q.build_instance(
        vertices=["a", "b", "c"],
        edges=[("a", "b"), ("a", "c"), ("b", "c")],
        node_params={v: q.NodeParams(lam, mu, B) for v in "abc"},
        edge_demand={
            e: q.EdgeDemand(nu, nu * (1 - nu), "bernoulli")
            for e in [("a", "b"), ("a", "c"), ("b", "c")]
        },
    )
