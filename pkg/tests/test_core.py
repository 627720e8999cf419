from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import explicit_walk, two_state_graph
from vassreach.core import (GE, LE, OMEGA, Configuration, Domain, ExtVector, Path, RankVector,
                            VassGraph, canonical_zone, cycle_space, displacement, edge_cycle_dim,
                            in_zone, is_walk, parikh, parikh_displacement, rank, rigid_dims,
                            run_path, scc_condense, step, zone_of)
from vassreach.errors import DomainViolation


def test_extvector_norm_and_order():
    v = ExtVector([3, OMEGA, 2])
    assert v.norm1() == 5
    assert repr(v) == "(3,w,2)"
    assert ExtVector([3, 7, 2]).sqsubseteq(v)
    assert not ExtVector([3, 7, 1]).sqsubseteq(v)
    assert ExtVector(["w", 1]) == ExtVector([OMEGA, 1])
    with pytest.raises(ValueError):
        ExtVector([-1])


def test_graph_size(two_state):
    assert two_state.norm_T == 3 + 2 + 3
    assert two_state.size == 2 + 8


def test_step_examples(two_state):
    c = step(two_state, Configuration("p", (22, 22, 22)), 0)
    assert c == Configuration("q", (22, 21, 20))
    zero = VassGraph.build(3, ["p"], [("z", "p", "p", (0, 0, 0))])
    assert step(zero, Configuration("p", (0, 0, 0)), 0).location == (0, 0, 0)
    with pytest.raises(DomainViolation):
        step(two_state, Configuration("p", (0, 0, 0)), 0)
    assert step(two_state, Configuration("p", (0, 0, 0)), 0, Domain.INT).location == (0, -1, -2)
    assert step(two_state, Configuration("p", (OMEGA, 1, OMEGA)), 0, Domain.NAT_OMEGA).location == (OMEGA, 0, OMEGA)


def test_explicit_walk_validates(two_state):
    path = Path(two_state, explicit_walk(two_state), "p")
    end = run_path(Configuration("p", (22, 22, 22)), path)
    assert end == Configuration("p", (42, 42, 22))
    assert displacement(path) == (20, 20, 0)
    assert parikh(path) == {0: 20, 1: 20, 2: 20}


def test_run_path_reports_index(two_state):
    with pytest.raises(DomainViolation) as e:
        run_path(Configuration("p", (0, 5, 5)), Path(two_state, (0, 1, 0, 2, 1, 0, 1, 0, 1, 0, 1), "p"))
    assert e.value.index is not None


def test_empty_path_and_single_state(single):
    assert run_path(Configuration("p", (5, 0, 3)), Path(single, (), "p")).location == (5, 0, 3)
    ids = (0, 1) * 100 + (1,) * 50
    assert run_path(Configuration("p", (50, 50, 50)), Path(single, ids, "p")).location == (150, 200, 100)


def test_scc_examples(two_state):
    assert len(scc_condense(two_state).components) == 1
    two = VassGraph.build(3, ["a", "b"], [])
    assert len(scc_condense(two).components) == 2
    chain = VassGraph.build(3, ["p", "q", "r"], [("a", "p", "q", (0, 0, 0)), ("b", "q", "r", (0, 0, 0))])
    cond = scc_condense(chain)
    assert [set(c) for c in cond.components] == [{"p"}, {"q"}, {"r"}]


def test_cycle_space_examples(two_state):
    cs = cycle_space(two_state)
    assert cs.dim == 2
    assert set(cs.basis) == {(1, 0, -2), (0, 1, 2)}
    assert all(2 * v[0] - 2 * v[1] + v[2] == 0 for v in cs.basis)
    chain = VassGraph.build(3, ["p", "q"], [("a", "p", "q", (1, 2, 3))])
    assert cycle_space(chain).dim == 0
    loops = VassGraph.build(3, ["p"], [(f"e{k}", "p", "p", tuple(int(i == k) for i in range(3))) for k in range(3)])
    assert cycle_space(loops).dim == 3


def test_rank_examples(two_state):
    assert rank(two_state) == RankVector((0, 3, 0, 0))
    assert edge_cycle_dim(two_state, 0) == 2
    chain = VassGraph.build(3, ["p", "q", "r"], [("a", "p", "q", (1, 0, 0)), ("b", "q", "r", (0, 1, 0))])
    assert rank(chain) == RankVector((0, 0, 0, 2))
    loop = VassGraph.build(3, ["p"], [("t", "p", "p", (1, 1, 1))])
    assert rank(loop) == RankVector((0, 0, 1, 0))
    assert RankVector((0, 2, 5, 0)) < RankVector((0, 3, 0, 0))


def test_rigid_dims():
    g = VassGraph.build(3, ["p", "q"], [("a", "p", "q", (1, 2, 0)), ("b", "q", "p", (1, -2, 0))])
    assert rigid_dims(g) == (1, 2)


def test_zones():
    assert zone_of((20, 20, 0)) == {(GE, GE, GE), (GE, GE, LE)}
    assert canonical_zone((20, 20, 0)) == (GE, GE, GE)
    assert len(zone_of((0, 0, 0))) == 8
    assert zone_of((-1, 2, -3)) == {(LE, GE, LE)}
    assert in_zone((1, -1, 0), (GE, LE, LE))


# -- properties ---------------------------------------------------------------------------

deltas = st.tuples(*[st.integers(-3, 3)] * 3)


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 3))
    states = [f"s{i}" for i in range(n)]
    ts = draw(st.lists(st.tuples(st.sampled_from(states), st.sampled_from(states), deltas), max_size=5))
    return VassGraph.build(3, states, [(f"t{i}", a, b, d) for i, (a, b, d) in enumerate(ts)])


@given(graphs(), st.lists(st.integers(0, 10), max_size=12), st.tuples(*[st.integers(0, 8)] * 3),
       st.tuples(*[st.integers(0, 4)] * 3))
@settings(max_examples=150, deadline=None)
def test_run_path_displacement_and_monotonicity(g, choices, m, delta):
    if not g.transitions:
        return
    state, ids = g.states[0], []
    for c in choices:
        out = g.out_edges[state]
        if not out:
            break
        t = out[c % len(out)]
        ids.append(t.id)
        state = t.dst
    path = Path(g, tuple(ids), g.states[0])
    assert displacement(path) == parikh_displacement(g, parikh(path))
    try:
        end = run_path(Configuration(g.states[0], m), path)
    except DomainViolation:
        return
    assert end.location == tuple(a + b for a, b in zip(m, displacement(path)))
    bigger = tuple(a + b for a, b in zip(m, delta))
    assert is_walk(g, g.states[0], bigger, ids)


@given(graphs(), st.lists(st.integers(0, 10), min_size=1, max_size=6))
@settings(max_examples=150, deadline=None)
def test_random_cycles_lie_in_cycle_space(g, choices):
    cs = cycle_space(g)
    for s in g.states:
        # random walk from s; every return to s closes a cycle
        state, acc = s, [0, 0, 0]
        for c in choices:
            out = g.out_edges[state]
            if not out:
                break
            t = out[c % len(out)]
            acc = [a + b for a, b in zip(acc, t.delta)]
            state = t.dst
            if state == s:
                assert cs.contains(acc)


@given(graphs(), st.randoms(use_true_random=False))
@settings(max_examples=100, deadline=None)
def test_rank_invariant_under_relabeling(g, rnd):
    names = {s: f"r{rnd.randrange(10**6)}_{i}" for i, s in enumerate(g.states)}
    ts = list(g.transitions)
    rnd.shuffle(ts)
    h = VassGraph.build(3, [names[s] for s in g.states], [(t.name, names[t.src], names[t.dst], t.delta) for t in ts])
    assert rank(g) == rank(h)
    assert cycle_space(g).dim == cycle_space(h).dim


@given(st.lists(st.integers(0, 5), min_size=3, max_size=3), st.lists(st.integers(0, 5), min_size=3, max_size=3),
       st.lists(st.one_of(st.integers(0, 5), st.just(OMEGA)), min_size=3, max_size=3))
def test_sqsubseteq_finite_is_equality(u, v, w):
    w = ExtVector(w)
    if ExtVector(u).sqsubseteq(w) and ExtVector(v).sqsubseteq(w) and w.is_finite():
        assert u == v
