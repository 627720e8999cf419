import pytest

from vassreach.core import VassGraph


def two_state_graph():
    """Two states p, q; cycles t1 t2 and t3 span the plane 2x - 2y + z = 0."""
    return VassGraph.build(3, ["p", "q"], [
        ("t1", "p", "q", (0, -1, -2)),
        ("t2", "q", "p", (1, 1, 0)),
        ("t3", "q", "q", (0, 1, 2)),
    ], "p", "p")


def single_state():
    return VassGraph.build(3, ["p"], [("t1", "p", "p", (1, 0, -1)), ("t2", "p", "p", (0, 1, 1))])


def explicit_walk(g):
    """t1 t3^20 t2 (t1 t2)^19 as transition ids."""
    return (0,) + (2,) * 20 + (1,) + (0, 1) * 19


@pytest.fixture
def two_state():
    return two_state_graph()


@pytest.fixture
def single():
    return single_state()
