import random
from itertools import islice

import pytest

from conftest import explicit_walk
from oracles import klm_witnesses
from vassreach.core import (OMEGA, Configuration, Domain, ExtVector, Path, RankVector, VassGraph,
                            cycle_space, run_path, scc_condense)
from vassreach.coverability import Pumpable, pumpable
from vassreach.diophantine import find_solution, hilbert_basis
from vassreach.errors import PreconditionUnmet, ResourceLimit
from vassreach.klm import (KlmComponent, KlmSequence, analyze, char_system, composite_char_system,
                           decompose_bounded, homogeneous_char_system, is_3normal, is_saturated, klm_rank,
                           reduce, reduce_component, reduction_choice, saturate, standardize,
                           unbounded_vars, witness_from_normal)
from vassreach.lps import LinearPathScheme

W = OMEGA


def two_state_scheme(g):
    return LinearPathScheme(g, "p", ((0,), (1,), ()), ((2,), (0, 1)))


def loop(*deltas, states=("p",)):
    return VassGraph.build(3, list(states), [(f"t{i}", "p", "p", d) for i, d in enumerate(deltas)])


def assignment(cs, values):
    """Full variable vector from a name -> value map (unnamed variables are 0)."""
    names = cs.system.names
    return tuple(values.get(n, 0) for n in names)


def test_char_system_two_state(two_state):
    xi = KlmSequence.single((22, 22, 22), two_state, (42, 42, 22))
    cs = char_system(xi)
    vals = {f"x0({k})": 22 for k in (1, 2, 3)}
    vals.update({"y0(1)": 42, "y0(2)": 42, "y0(3)": 22})
    vals.update({f"phi0(t{j})": 20 for j in (1, 2, 3)})
    assert cs.system.satisfied_by(assignment(cs, vals))
    vals["phi0(t3)"] = 19
    assert not cs.system.satisfied_by(assignment(cs, vals))
    hom = homogeneous_char_system(xi)
    assert not hilbert_basis(hom.system).vectors


def test_char_system_edgeless():
    g = VassGraph.build(3, ["p"], [])
    assert find_solution(char_system(KlmSequence.single((1, 2, 3), g, (1, 2, 3))).system) is not None
    assert find_solution(char_system(KlmSequence.single((1, 2, 3), g, (1, 2, 4))).system) is None


def test_composite_system_with_scheme(two_state):
    comp = KlmComponent(ExtVector((22, 22, 22)), two_state, ExtVector((42, 42, 22)), scheme=two_state_scheme(two_state))
    xi = KlmSequence((comp,))
    an = analyze(xi)
    assert an is not None
    cv = an.cs.comps[0]
    assert {tuple(s[j] for j in cv.phi) for s in an.res.minimal} == {(20, 19)}
    plain = KlmSequence.single((22, 22, 22), two_state, (42, 42, 22))
    assert composite_char_system(plain).system == char_system(plain).system


def test_composite_system_intermediate_negativity(two_state):
    g = two_state.with_endpoints("p", "q")
    scheme = LinearPathScheme(g, "p", ((0,), ()), ((2,),))
    lps = KlmSequence((KlmComponent(ExtVector((0, 0, 0)), g, ExtVector((0, 0, 0)), scheme=scheme),))
    assert analyze(lps) is None
    # the state equation of the graph itself balances with t1 t3
    assert analyze(KlmSequence.single((0, 0, 0), g, (0, 0, 0))) is not None


def test_unbounded_vars_examples(two_state):
    assert unbounded_vars(KlmSequence.single((22, 22, 22), two_state, (42, 42, 22))) == frozenset()
    xi = KlmSequence.single((W, W, W), loop((1, 1, 1)), (W, W, W))
    assert unbounded_vars(xi) == frozenset(analyze(xi).cs.system.names)
    mixed = unbounded_vars(KlmSequence.single((W, 0, W), loop((1, 1, 1)), (W, W, W)))
    assert "x0(1)" in mixed and "x0(3)" in mixed and "x0(2)" not in mixed
    assert "phi0(t0)" in mixed


def test_saturate_examples(two_state):
    xi = KlmSequence.single((22, 22, 22), two_state, (42, 42, 22))
    assert saturate(xi) == [xi]
    edgeless = KlmSequence.single((W, 0, 0), VassGraph.build(3, ["p"], []), (3, 0, 0))
    (out,) = saturate(edgeless)
    assert tuple(out.components[0].u) == (3, 0, 0)
    two = VassGraph.build(3, ["p"], [("a", "p", "p", (1, -1, 0)), ("b", "p", "p", (-1, 1, 0))])
    branches = saturate(KlmSequence.single((2, 0, 0), two, (W, W, 0)))
    assert sorted(tuple(b.components[0].v) for b in branches) == [(0, 2, 0), (1, 1, 0), (2, 0, 0)]


def test_standardize_examples():
    g = VassGraph.build(3, ["a", "b"], [
        ("la", "a", "a", (1, 0, 0)), ("lb", "b", "b", (0, 1, 0)),
        ("e1", "a", "b", (0, 0, 1)), ("e2", "a", "b", (0, 0, 2)),
    ], "a", "b")
    xi = KlmSequence.single((0, 0, 0), g, (W, W, W))
    out = list(standardize(xi))
    assert len(out) == 2
    assert sorted(x.connectors[0].name for x in out) == ["e1", "e2"]
    for x in out:
        assert len(x.components) == 2
        assert all(len(scc_condense(c.graph).components) == 1 for c in x.components)
        assert klm_rank(x) < klm_rank(xi)
        assert is_saturated(x, analyze(x))
    sc = KlmSequence.single((0, 0, 0), loop((1, 1, 1)), (W, W, W))
    assert list(standardize(sc)) == [sc]
    cut = VassGraph.build(3, ["p", "q"], [("t", "q", "p", (1, 0, 0))], "p", "q")
    assert list(standardize(KlmSequence.single((0, 0, 0), cut, (W, W, W)))) == []


def test_decompose_bounded_two_state(two_state):
    xi = KlmSequence.single((22, 22, 22), two_state, (42, 42, 22))
    an = analyze(xi)
    assert an.component_bounded_edges(0) == (0, 1, 2)
    for br in islice(decompose_bounded(xi, 0, an), 5):
        assert len(br.connectors) == 60
        assert all(not c.graph.transitions for c in br.components)
        ids = tuple(a.origin for a in br.connectors)
        end = run_path(Configuration("p", (22, 22, 22)), Path(two_state, ids, "p"), Domain.NAT)
        assert end == Configuration("p", (42, 42, 22))
        assert klm_rank(br) == RankVector.zero(3)


def test_decompose_bounded_precondition():
    xi = KlmSequence.single((0, 0, 0), loop((1, 1, 1)), (W, W, W))
    with pytest.raises(PreconditionUnmet):
        list(decompose_bounded(xi, 0, analyze(xi)))


def test_decompose_bounded_splits_at_edge():
    g = VassGraph.build(3, ["p", "q"], [
        ("a", "p", "p", (1, 0, 0)), ("t", "p", "q", (0, 1, 0)),
        ("b", "q", "q", (1, 0, 0)), ("s", "q", "p", (0, 1, 0)),
    ], "p", "q")
    xi = KlmSequence.single((0, 0, 0), g, (W, 1, 0))
    an = analyze(xi)
    assert an.component_bounded_edges(0) == (1, 3)
    (br,) = list(decompose_bounded(xi, 0, an))
    first, second = br.components
    assert first.graph.states == ("p",) and [t.name for t in first.graph.transitions] == ["a"]
    assert second.graph.states == ("q",) and [t.name for t in second.graph.transitions] == ["b"]
    assert br.connectors[0].delta == (0, 1, 0)
    assert klm_rank(br) < klm_rank(xi)


def test_reduce_examples():
    xi = KlmSequence.single((0, 0, 0), loop((1, 0, 0)), (3, 0, 0))
    (br,) = list(reduce_component(xi, 0, 1, 0))
    g = br.components[0].graph
    assert g.states == ("p|2:0",)
    assert [t.delta for t in g.transitions] == [(1, 0, 0)]
    assert br.components[0].u == xi.components[0].u and br.components[0].v == xi.components[0].v

    both = loop((1, 0, 0), (-1, 0, 0))
    free = KlmSequence.single((2, 0, 0), both, (W, 0, 0))
    assert len(list(reduce_component(free, 0, 0, 3))) == 4
    (fixed,) = list(reduce_component(KlmSequence.single((2, 0, 0), both, (1, 0, 0)), 0, 0, 3))
    assert (fixed.components[0].p, fixed.components[0].q) == ("p|1:2", "p|1:1")

    # exact bound from the reversed graph: coordinate 1 never exceeds 3
    (br,) = list(reduce(xi, 0, 0))
    assert br.components[0].graph.states == tuple(f"p|1:{h}" for h in range(4))
    assert klm_rank(br) < klm_rank(xi)


def test_rank_and_normality(two_state):
    bounded = KlmSequence.single((22, 22, 22), two_state, (42, 42, 22))
    assert klm_rank(bounded) == RankVector((0, 3, 0, 0))
    assert not is_3normal(bounded)
    lps = KlmSequence((KlmComponent(ExtVector((22, 22, 22)), two_state, ExtVector((42, 42, 22)),
                                    scheme=two_state_scheme(two_state)),))
    assert klm_rank(lps) == RankVector.zero(3)
    assert is_3normal(lps)
    swing = VassGraph.build(3, ["p"], [("a", "p", "p", (1, -1, 0)), ("b", "p", "p", (-1, 1, 0))])
    stuck = KlmSequence.single((0, 0, 0), swing, (0, 0, 0))
    assert not isinstance(pumpable(swing, (0, 0, 0), (0, 0, 0), ignore_rigid=True), Pumpable)
    assert not is_3normal(stuck)


def test_witness_from_normal_examples(two_state):
    lps = KlmSequence((KlmComponent(ExtVector((22, 22, 22)), two_state, ExtVector((42, 42, 22)),
                                    scheme=two_state_scheme(two_state)),))
    w = witness_from_normal(lps, analyze(lps))
    assert w.path == explicit_walk(two_state)

    xi = KlmSequence.single((0, 0, 0), loop((1, 1, 1)), (W, W, W))
    assert is_3normal(xi)
    w = witness_from_normal(xi, analyze(xi))
    end = run_path(Configuration("p", (0, 0, 0)), Path(xi.components[0].graph, w.path, "p"), Domain.NAT)
    assert end.location == w.end == (len(w.path),) * 3

    # bounded loop^5 is decomposed into five connectors around empty components
    five = KlmSequence.single((0, 0, 0), loop((1, 1, 1)), (5, 5, 5))
    (br,) = list(decompose_bounded(five, 0, analyze(five)))
    assert is_3normal(br)
    assert witness_from_normal(br, analyze(br)).path == (0,) * 5


# -- properties on random desk-scale instances ---------------------------------------------

def _random_instance(rng):
    n = rng.randint(1, 2)
    states = [f"s{i}" for i in range(n)]
    ts = [(f"t{j}", rng.choice(states), rng.choice(states), tuple(rng.randint(-2, 2) for _ in range(3)))
          for j in range(rng.randint(2, 3))]
    g = VassGraph.build(3, states, ts)
    p = rng.choice(states)
    m = tuple(rng.randint(0, 3) for _ in range(3))
    s, loc = p, m
    for _ in range(rng.randint(0, 4)):
        opts = [t for t in g.out_edges[s] if min(a + b for a, b in zip(loc, t.delta)) >= 0]
        if not opts:
            break
        t = rng.choice(opts)
        s, loc = t.dst, tuple(a + b for a, b in zip(loc, t.delta))
    v = tuple(W if rng.random() < 0.4 else x for x in loc)
    return KlmSequence.single(m, g.with_endpoints(p, s), v), m


LIMIT = 200


def _all(gen):
    out = list(islice(gen, LIMIT + 1))
    if len(out) > LIMIT:
        raise ResourceLimit("too many branches for an extensional check")
    return out


def _rewrites(xi):
    """(kind, input, branches) for every applicable construction on standard descendants of ``xi``."""
    yield "saturate", xi, saturate(xi)
    std = _all(standardize(xi))
    yield "standardize", xi, std
    for x in std:
        an = analyze(x)
        for i, c in enumerate(x.components):
            if an.component_bounded_edges(i):
                yield "decompose", x, _all(decompose_bounded(x, i, an))
            if c.graph.transitions:
                # any exactly bounded non-rigid coordinate is a valid reduction, pumpable or not
                choice = reduction_choice(c, (), 50_000)
                if choice is not None and choice[1] <= 8:
                    yield "reduce", x, list(reduce_component(x, i, *choice))


def test_constructions_preserve_witnesses_and_decrease_rank():
    rng = random.Random(4)
    seen = {"saturate": 0, "standardize": 0, "decompose": 0, "reduce": 0}
    checked = 0
    while checked < 60:
        xi, m = _random_instance(rng)
        try:
            rewrites = list(_rewrites(xi))
        except ResourceLimit:
            continue
        checked += 1
        for kind, src, branches in rewrites:
            before = klm_witnesses(src, m, 6)
            after = set().union(*(klm_witnesses(b, m, 6) for b in branches)) if branches else set()
            assert before == after, (kind, src.serialize())
            seen[kind] += 1
            r0 = klm_rank(src)
            for b in branches:
                if kind in ("decompose", "reduce"):
                    assert klm_rank(b) < r0, (kind, src.serialize())
                else:
                    assert klm_rank(b) <= r0
    assert all(seen.values()), seen


def test_saturation_is_a_fixpoint():
    rng = random.Random(8)
    done = 0
    while done < 60:
        xi, _ = _random_instance(rng)
        try:
            branches = saturate(xi)
        except ResourceLimit:
            continue
        for b in branches:
            assert saturate(b) == [b]
        done += 1


def test_decomposition_of_full_dimensional_components_lowers_dimension():
    rng = random.Random(6)
    hits = 0
    for _ in range(400):
        xi, _ = _random_instance(rng)
        try:
            std = _all(standardize(xi))
        except ResourceLimit:
            continue
        for x in std:
            an = analyze(x)
            for i, c in enumerate(x.components):
                if cycle_space(c.graph).dim == 3 and an.component_bounded_edges(i):
                    for br in islice(decompose_bounded(x, i, an), LIMIT):
                        new = br.components[i:i + len(br.components) - len(x.components) + 1]
                        assert all(cycle_space(n.graph).dim <= 2 for n in new)
                    hits += 1
    assert hits >= 5
