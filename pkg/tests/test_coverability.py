import random

from hypothesis import given, settings, strategies as st

from oracles import reachable_set
from vassreach.core import OMEGA, Configuration, Path, VassGraph, run_path
from vassreach.coverability import NotBackward, NotForward, Pumpable, cover_path, km_bounds, pumpable


def loop(delta):
    return VassGraph.build(3, ["p"], [("t", "p", "p", delta)])


def test_pumpable_examples(two_state):
    assert pumpable(loop((1, 1, 1)), (0, 0, 0), (OMEGA,) * 3) == Pumpable((0,), ())
    res = pumpable(loop((1, 0, 0)), (0, 0, 0), (3, 0, 0))
    assert isinstance(res, NotForward) and res.dims == frozenset({1, 2})
    assert pumpable(loop((1, 0, 0)), (OMEGA,) * 3, (OMEGA,) * 3) == Pumpable((), ())
    assert pumpable(loop((-1, -1, -1)), (OMEGA,) * 3, (0, 0, 0)) == Pumpable((), (0,))
    res = pumpable(loop((1, 1, 1)), (OMEGA,) * 3, (0, 0, 0))
    assert isinstance(res, NotBackward) and res.dims == frozenset({0, 1, 2})


def test_ignore_rigid_dimensions():
    g = loop((1, 0, 1))
    assert isinstance(pumpable(g, (0, 0, 0), (OMEGA,) * 3), NotForward)
    assert pumpable(g, (0, 0, 0), (OMEGA,) * 3, ignore_rigid=True) == Pumpable((0,), ())


def test_km_bounds_examples(two_state):
    assert km_bounds(two_state, "p", (2, 2, 2)) == (OMEGA, OMEGA, OMEGA)
    assert km_bounds(two_state, "p", (0, 0, 0)) == (0, 0, 0)
    two = VassGraph.build(3, ["p"], [("a", "p", "p", (-1, 1, 0)), ("b", "p", "p", (1, -1, 0))])
    assert km_bounds(two, "p", (2, 1, 7)) == (3, 3, 7)


def _random_graph(rng):
    n = rng.randint(1, 3)
    states = [f"s{i}" for i in range(n)]
    ts = [(f"t{j}", rng.choice(states), rng.choice(states), tuple(rng.randint(-2, 2) for _ in range(3)))
          for j in range(rng.randint(1, 4))]
    return VassGraph.build(3, states, ts)


def test_km_bounds_against_bfs():
    rng = random.Random(5)
    for _ in range(100):
        g = _random_graph(rng)
        p = rng.choice(g.states)
        u = tuple(rng.randint(0, 3) for _ in range(3))
        bounds = km_bounds(g, p, u)
        small, large = reachable_set(g, p, u, 30), reachable_set(g, p, u, 60)
        for k in range(3):
            top_small = max(loc[k] for _, loc in small)
            top_large = max(loc[k] for _, loc in large)
            if bounds[k] is OMEGA:
                # the supremum keeps growing with the box
                assert top_large > top_small, (g, p, u, bounds)
            else:
                assert top_small == top_large == bounds[k], (g, p, u, bounds)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.lists(st.integers(0, 4), min_size=3, max_size=3),
       st.lists(st.integers(0, 6), min_size=3, max_size=3))
def test_cover_path_is_a_covering_walk(seed, u, target):
    rng = random.Random(seed)
    g = _random_graph(rng)
    p, q = rng.choice(g.states), rng.choice(g.states)
    path = cover_path(g, p, u, q, target)
    seen = reachable_set(g, p, tuple(u), 25)
    covered = any(s == q and all(x >= y for x, y in zip(loc, target)) for s, loc in seen)
    if path is None:
        assert not covered
    else:
        end = run_path(Configuration(p, tuple(u)), Path(g, tuple(path), p))
        assert end.state == q and all(x >= y for x, y in zip(end.location, target))
