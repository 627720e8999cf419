"""KLM sequences and the constructions that rewrite them.

A KLM sequence is ``(u_0 G_0 v_0) a_1 (u_1 G_1 v_1) ... a_n (u_n G_n v_n)``.
Each component is either a graph (with entry ``G.q_in`` and exit ``G.q_out``) or a
linear path scheme over its graph. Connectors ``a_i`` are real transitions whose
``origin`` points into the input VASS, as do all component transitions, so a
witness is a flat path of input transition ids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Iterator, Sequence

from .core import (OMEGA, Configuration, Domain, ExtVector, Path, RankVector, Transition,
                   VassGraph, cycle_space, rank, rigid_dims, run_path, scc_condense,
                   state_potentials)
from .coverability import NotBackward, NotForward, Pumpable, km_bounds, pumpable
from .diophantine import DEFAULT_NODE_CAP, UNSAT, AffineResult, SystemBuilder, solve_affine
from .errors import DomainViolation, InternalInconsistency, PreconditionUnmet, ResourceLimit
from .lps import LinearPathScheme, LpsLayout, add_lps_rows, extract_walk, LpsSolution


@dataclass(frozen=True)
class KlmComponent:
    u: ExtVector
    graph: VassGraph
    v: ExtVector
    scheme: LinearPathScheme | None = None
    declined: bool = False  # scheme replacement already explored for this graph

    @property
    def kind(self) -> str:
        return "lps" if self.scheme is not None else "graph"

    @property
    def p(self) -> str:
        return self.graph.q_in

    @property
    def q(self) -> str:
        return self.graph.q_out

    def size(self) -> int:
        return self.u.norm1() + self.graph.size + self.v.norm1()

    def __repr__(self):
        body = repr(self.scheme) if self.scheme else f"G[{len(self.graph.states)}q,{len(self.graph.transitions)}t {self.p}->{self.q}]"
        return f"({self.u!r} {body} {self.v!r})"


@dataclass(frozen=True)
class KlmSequence:
    components: tuple[KlmComponent, ...]
    connectors: tuple[Transition, ...] = ()

    def __post_init__(self):
        if len(self.connectors) != len(self.components) - 1:
            raise ValueError("need one connector between consecutive components")
        for a, c0, c1 in zip(self.connectors, self.components, self.components[1:]):
            if a.src != c0.q or a.dst != c1.p:
                raise ValueError(f"connector {a.name} does not join {c0.q} to {c1.p}")

    @classmethod
    def single(cls, u, graph: VassGraph, v) -> "KlmSequence":
        return cls((KlmComponent(ExtVector(u), graph, ExtVector(v)),))

    @property
    def dim(self) -> int:
        return self.components[0].graph.dim

    def size(self) -> int:
        d = self.dim
        n = len(self.components) - 1
        body = sum(c.size() for c in self.components) + sum(a.norm1 for a in self.connectors)
        return 2 * (d + 1) ** (d + 1) * (n + body)

    def replace_component(self, i: int, parts: Sequence[KlmComponent],
                          inner: Sequence[Transition] = ()) -> "KlmSequence":
        """Substitute component ``i`` by ``parts`` joined by ``inner`` connectors."""
        comps = self.components[:i] + tuple(parts) + self.components[i + 1:]
        conns = self.connectors[:i] + tuple(inner) + self.connectors[i:]
        return KlmSequence(comps, conns)

    def with_component(self, i: int, comp: KlmComponent) -> "KlmSequence":
        return self.replace_component(i, [comp])

    def serialize(self) -> str:
        out = []
        for i, c in enumerate(self.components):
            if i:
                a = self.connectors[i - 1]
                out.append(f"a{i}={list(a.delta)}")
            out.append(repr(c))
        return " ".join(out)


def klm_rank(xi: KlmSequence) -> RankVector:
    total = RankVector.zero(xi.dim)
    for c in xi.components:
        if c.kind == "graph":
            total = total + rank(c.graph)
    return total


# -- characteristic systems ---------------------------------------------------------

@dataclass(frozen=True)
class ComponentVars:
    x: tuple[int, ...]
    y: tuple[int, ...]
    phi: tuple[int, ...]  # per transition (graph) or per cycle (scheme)
    lps: LpsLayout | None = None


@dataclass(frozen=True)
class CharSystem:
    system: object  # DiophantineSystem
    comps: tuple[ComponentVars, ...]
    homogeneous: bool


def composite_char_system(xi: KlmSequence, homogeneous: bool = False) -> CharSystem:
    """Euler, displacement and boundary equations per graph component, scheme
    equations per scheme component, and ``x_{i+1} = y_i + a_{i+1}`` between them."""
    b = SystemBuilder()
    d = xi.dim
    comps = []
    for i, c in enumerate(xi.components):
        x = tuple(b.var(f"x{i}({k + 1})") for k in range(d))
        y = tuple(b.var(f"y{i}({k + 1})") for k in range(d))
        if c.kind == "lps":
            lay = add_lps_rows(b, c.scheme, x, y, prefix=f"c{i}.", homogeneous=homogeneous)
            comps.append(ComponentVars(x, y, lay.phi, lay))
        else:
            g = c.graph
            phi = tuple(b.var(f"phi{i}({t.name or t.id})") for t in g.transitions)
            for k in range(d):
                b.row([(y[k], 1), (x[k], -1)] + [(phi[t.id], -t.delta[k]) for t in g.transitions], 0)
            for s in g.states:
                coeffs = [(phi[t.id], 1) for t in g.in_edges[s]] + [(phi[t.id], -1) for t in g.out_edges[s]]
                rhs = 0 if homogeneous else int(s == c.q) - int(s == c.p)
                b.row(coeffs, rhs)
            comps.append(ComponentVars(x, y, phi))
        for k in range(d):
            if c.u[k] is not OMEGA:
                b.fix(x[k], 0 if homogeneous else c.u[k])
            if c.v[k] is not OMEGA:
                b.fix(y[k], 0 if homogeneous else c.v[k])
    for i, a in enumerate(xi.connectors):
        for k in range(d):
            b.row([(comps[i + 1].x[k], 1), (comps[i].y[k], -1)], 0 if homogeneous else a.delta[k])
    return CharSystem(b.build(), tuple(comps), homogeneous)


def char_system(xi: KlmSequence) -> CharSystem:
    if any(c.kind != "graph" for c in xi.components):
        raise ValueError("char_system needs graph components only; use composite_char_system")
    return composite_char_system(xi)


def homogeneous_char_system(xi: KlmSequence) -> CharSystem:
    return composite_char_system(xi, homogeneous=True)


@dataclass(frozen=True)
class Analysis:
    """Solved composite system of a sequence."""

    cs: CharSystem
    res: AffineResult

    def bounded(self, var: int) -> bool:
        return self.res.bounded[var]

    def component_bounded_edges(self, i: int) -> tuple[int, ...]:
        return tuple(t for t, v in enumerate(self.cs.comps[i].phi) if self.res.bounded[v])


def analyze(xi: KlmSequence, cap: int = DEFAULT_NODE_CAP) -> Analysis | None:
    """Solve the composite system; ``None`` when unsatisfiable."""
    cs = composite_char_system(xi)
    res = solve_affine(cs.system, cap)
    if res is UNSAT:
        return None
    size = xi.size()
    # the bounded variables sum to less than |xi|^(|xi|-1) on every minimal solution
    bounded_ix = [j for j, bd in enumerate(res.bounded) if bd]
    for s in res.minimal:
        total = sum(s[j] for j in bounded_ix)
        assert total == 0 or math.log(total) < (size - 1) * math.log(size), "bounded-sum bound violated"
    return Analysis(cs, res)


def unbounded_vars(xi: KlmSequence, cap: int = DEFAULT_NODE_CAP):
    """Names of variables unbounded over the solution set (``h0 > 0``); raises on Unsat."""
    an = analyze(xi, cap)
    if an is None:
        raise ValueError("Unsat")
    names = an.cs.system.names
    return frozenset(names[j] for j, h in enumerate(an.res.h0) if h > 0)


# -- saturation -----------------------------------------------------------------------

def unsaturated_entries(xi: KlmSequence, an: Analysis):
    """Boundary OMEGA entries whose variable is bounded: ``(comp, 'u'|'v', coord, var)``."""
    out = []
    for i, (c, cv) in enumerate(zip(xi.components, an.cs.comps)):
        for k in range(xi.dim):
            if c.u[k] is OMEGA and an.bounded(cv.x[k]):
                out.append((i, "u", k, cv.x[k]))
            if c.v[k] is OMEGA and an.bounded(cv.y[k]):
                out.append((i, "v", k, cv.y[k]))
    return out


def saturate(xi: KlmSequence, an: Analysis | None = None, cap: int = DEFAULT_NODE_CAP) -> list[KlmSequence]:
    """Replace bounded OMEGA boundary entries by their values, one branch per attainable tuple.

    Bounded variables take the same value on a minimal solution and on every
    solution above it, so the attainable tuples are the projections of the
    minimal solutions. An already saturated sequence yields ``[xi]``.
    """
    an = an or analyze(xi, cap)
    if an is None:
        return []
    entries = unsaturated_entries(xi, an)
    if not entries:
        return [xi]
    tuples = sorted({tuple(s[var] for *_, var in entries) for s in an.res.minimal})
    out = []
    for vals in tuples:
        comps = list(xi.components)
        for (i, side, k, _), val in zip(entries, vals):
            c = comps[i]
            if side == "u":
                comps[i] = replace(c, u=c.u.with_entry(k, val))
            else:
                comps[i] = replace(c, v=c.v.with_entry(k, val))
        out.append(KlmSequence(tuple(comps), xi.connectors))
    return out


def is_saturated(xi: KlmSequence, an: Analysis) -> bool:
    return not unsaturated_entries(xi, an)


# -- trimming, rigid cleaning, linearisation ---------------------------------------------

def trim(comp: KlmComponent) -> KlmComponent | None:
    """Drop states not on any path from entry to exit; ``None`` if the exit is unreachable."""
    g = comp.graph
    fwd = g.reachable_from(comp.p)
    if comp.q not in fwd:
        return None
    keep = fwd & g.coreachable_to(comp.q)
    if len(keep) == len(g.states):
        return comp
    states = tuple(s for s in g.states if s in keep)
    sub = g.subgraph(states, range(len(g.transitions)), comp.p, comp.q)
    return replace(comp, graph=sub)


def rigid_clean(comp: KlmComponent) -> KlmComponent | None:
    """Remove states where a rigid coordinate would be negative (strongly connected graphs)."""
    g = comp.graph
    rig = rigid_dims(g)
    if not rig or not g.transitions:
        return comp
    pot = state_potentials(g, comp.p)
    bad = set()
    for k in rig:
        if comp.u[k] is not OMEGA:
            base = comp.u[k]
        elif comp.v[k] is not OMEGA:
            base = comp.v[k] - pot[comp.q][k]
        else:
            continue
        bad |= {s for s in g.states if base + pot[s][k] < 0}
    if not bad:
        return comp
    if comp.p in bad or comp.q in bad:
        return None
    states = tuple(s for s in g.states if s not in bad)
    return trim(replace(comp, graph=g.subgraph(states, range(len(g.transitions)), comp.p, comp.q)))


def _component_on(g: VassGraph, states, entry, exit_, u, v) -> KlmComponent:
    keep = set(states)
    ids = [t.id for t in g.transitions if t.src in keep and t.dst in keep]
    st = tuple(s for s in g.states if s in keep)
    return KlmComponent(u, g.subgraph(st, ids, entry, exit_), v)


def linearize(xi: KlmSequence, i: int) -> Iterator[KlmSequence]:
    """Branches splitting component ``i`` along chains of its strongly connected components."""
    comp = xi.components[i]
    g = comp.graph
    cond = scc_condense(g)
    d = g.dim
    omega = ExtVector.omega(d)
    by_comp: dict[tuple[int, int], list[Transition]] = {}
    for t in g.transitions:
        a, b = cond.comp_of[t.src], cond.comp_of[t.dst]
        if a != b:
            by_comp.setdefault((a, b), []).append(t)
    target = cond.comp_of[comp.q]

    def rec(ci, entry, parts, conns):
        if ci == target:
            parts = parts + [_component_on(g, cond.components[ci], entry, comp.q,
                                           comp.u if not parts else omega, comp.v)]
            yield parts, conns
            return
        for (a, b), edges in sorted(by_comp.items()):
            if a != ci:
                continue
            for t in edges:
                part = _component_on(g, cond.components[ci], entry, t.src, comp.u if not parts else omega, omega)
                conn = Transition(0, t.src, t.dst, t.delta, t.name, t.origin)
                yield from rec(b, t.dst, parts + [part], conns + [conn])

    for parts, conns in rec(cond.comp_of[comp.p], comp.p, [], []):
        yield xi.replace_component(i, parts, conns)


def standardize(xi: KlmSequence, cap: int = DEFAULT_NODE_CAP) -> Iterator[KlmSequence]:
    """Saturated sequences whose graph components are strongly connected and trimmed.

    Their witness sets partition (up to overlap) the witness set of ``xi``;
    unsatisfiable branches are dropped.
    """
    an = analyze(xi, cap)
    if an is None:
        return
    sats = saturate(xi, an)
    if sats != [xi]:
        for x in sats:
            yield from standardize(x, cap)
        return
    for i, c in enumerate(xi.components):
        if c.kind != "graph":
            continue
        t = trim(c)
        if t is None:
            return
        if t is not c:
            yield from standardize(xi.with_component(i, t), cap)
            return
        if len(scc_condense(c.graph).components) != 1:
            for x in linearize(xi, i):
                yield from standardize(x, cap)
            return
    yield xi


# -- bounded decomposition ---------------------------------------------------------------

def _segment(g: VassGraph, unbounded_ids, s, s2, u, v) -> KlmComponent | None:
    """Component for a stretch between two bounded-edge occurrences (only unbounded edges)."""
    sub = g.subgraph(g.states, unbounded_ids, s, s2)
    comp = trim(KlmComponent(u, sub, v))
    return comp


def decompose_bounded(xi: KlmSequence, i: int, an: Analysis, branch_cap: int = 100_000
                      ) -> Iterator[KlmSequence]:
    """Replacements of component ``i`` in which each bounded edge is a connector.

    Branches over the attainable multiplicity tuples of the bounded edges and over
    every order of those occurrences compatible with reachability through the
    unbounded edges. When there are no unbounded edges and the entry location is
    known, prefixes that go negative are pruned.
    """
    comp = xi.components[i]
    g = comp.graph
    cv = an.cs.comps[i]
    bounded = an.component_bounded_edges(i)
    if not bounded:
        raise PreconditionUnmet("component is unbounded")
    unbounded = [t.id for t in g.transitions if t.id not in bounded]
    tuples = sorted({tuple(s[cv.phi[t]] for t in bounded) for s in an.res.minimal})
    d = g.dim
    omega = ExtVector.omega(d)
    ts = g.transitions
    if unbounded:
        sub = g.subgraph(g.states, unbounded, g.q_in, g.q_out)
        reach = {s: sub.reachable_from(s) for s in g.states}
    else:
        reach = {s: {s} for s in g.states}
    concrete = not unbounded and comp.u.is_finite()
    emitted = 0

    for counts in tuples:
        left = dict(zip(bounded, counts))
        total = sum(counts)

        def rec(state, order, loc):
            nonlocal emitted
            if len(order) == total:
                if comp.q in reach[state]:
                    yield order
                return
            for t in bounded:
                if not left[t]:
                    continue
                tr = ts[t]
                if tr.src not in reach[state]:
                    continue
                nloc = None
                if loc is not None:
                    nloc = tuple(a + b for a, b in zip(loc, tr.delta))
                    if min(nloc) < 0:
                        continue
                left[t] -= 1
                yield from rec(tr.dst, order + [t], nloc)
                left[t] += 1

        start_loc = tuple(comp.u) if concrete else None
        for order in rec(comp.p, [], start_loc):
            emitted += 1
            if emitted > branch_cap:
                raise ResourceLimit(f"bounded decomposition exceeded {branch_cap} branches")
            parts, conns = [], []
            state = comp.p
            ok = True
            for j, t in enumerate(order):
                tr = ts[t]
                seg = _segment(g, unbounded, state, tr.src, comp.u if j == 0 else omega, omega)
                if seg is None:
                    ok = False
                    break
                parts.append(seg)
                conns.append(Transition(0, tr.src, tr.dst, tr.delta, tr.name, tr.origin))
                state = tr.dst
            if not ok:
                continue
            last = _segment(g, unbounded, state, comp.q, comp.u if not order else omega, comp.v)
            if last is None:
                continue
            parts.append(last)
            yield xi.replace_component(i, parts, conns)


# -- reduction ----------------------------------------------------------------------------

def reduced_graph(g: VassGraph, k: int, bound: int) -> VassGraph:
    """Track coordinate ``k`` in the state within ``[0, bound]``; displacements keep all coordinates."""
    name = lambda s, h: f"{s}|{k + 1}:{h}"
    states = tuple(name(s, h) for s in g.states for h in range(bound + 1))
    ts = []
    for t in g.transitions:
        a = t.delta[k]
        for h in range(bound + 1):
            if 0 <= h + a <= bound:
                ts.append(Transition(len(ts), name(t.src, h), name(t.dst, h + a), t.delta, t.name, t.origin))
    return VassGraph(g.dim, states, tuple(ts), name(g.q_in, 0), name(g.q_out, 0))


def reduce_component(xi: KlmSequence, i: int, k: int, bound: int) -> Iterator[KlmSequence]:
    """Branches replacing component ``i`` by its reduction on coordinate ``k`` with band ``bound``.

    A free (OMEGA) endpoint value of coordinate ``k`` is guessed in ``[0, bound]``.
    """
    comp = xi.components[i]
    g = comp.graph
    red = reduced_graph(g, k, bound)
    name = lambda s, h: f"{s}|{k + 1}:{h}"
    us = [comp.u[k]] if comp.u[k] is not OMEGA else list(range(bound + 1))
    vs = [comp.v[k]] if comp.v[k] is not OMEGA else list(range(bound + 1))
    for a in us:
        for b in vs:
            if a > bound or b > bound:
                continue
            gg = red.with_endpoints(name(comp.p, a), name(comp.q, b))
            new = trim(KlmComponent(comp.u.with_entry(k, a), gg, comp.v.with_entry(k, b)))
            if new is None:
                continue
            # neighbouring connectors now enter and leave the renamed states
            conns = list(xi.connectors)
            if i > 0:
                conns[i - 1] = replace(conns[i - 1], dst=new.p)
            if i < len(conns):
                conns[i] = replace(conns[i], src=new.q)
            comps = xi.components[:i] + (new,) + xi.components[i + 1:]
            yield KlmSequence(comps, tuple(conns))


def reduce(xi: KlmSequence, i: int, k: int, bound: int | None = None, km_cap: int = 50_000
           ) -> Iterator[KlmSequence]:
    """Reduction of component ``i`` on coordinate ``k``.

    Without ``bound`` the exact supremum of coordinate ``k`` over runs from the
    entry (or, reversed, into the exit) is used.
    """
    if bound is None:
        c = xi.components[i]
        fwd = km_bounds(c.graph, c.p, tuple(c.u), km_cap)[k]
        bwd = km_bounds(c.graph.reversed(), c.q, tuple(c.v), km_cap)[k]
        finite = [b for b in (fwd, bwd) if b is not OMEGA]
        if not finite:
            raise PreconditionUnmet(f"coordinate {k + 1} is unbounded in both directions")
        bound = min(finite)
    return reduce_component(xi, i, k, bound)


def worst_case_band_bound(xi: KlmSequence) -> int:
    """``(2|xi|)^(1 + d^d)``."""
    d = xi.dim
    return (2 * xi.size()) ** (1 + d ** d)


def reduction_choice(comp: KlmComponent, failing, km_cap: int):
    """A non-rigid coordinate bounded along every run of the component, with its exact bound.

    Uses Karp-Miller from the entry and, on the reversed graph, from the exit.
    Returns ``(coord, bound)`` or ``None`` when every candidate is unbounded.
    """
    g = comp.graph
    rig = set(rigid_dims(g))
    best = None
    fwd = km_bounds(g, comp.p, tuple(comp.u), km_cap)
    bwd = km_bounds(g.reversed(), comp.q, tuple(comp.v), km_cap)
    for k in range(g.dim):
        if k in rig:
            continue
        for bnd in (fwd[k], bwd[k]):
            if bnd is not OMEGA:
                if best is None or (bnd, k) < best[::-1]:
                    best = (k, bnd)
    return best


# -- normality and witnesses -----------------------------------------------------------------

def is_standard_component(comp: KlmComponent, cv: ComponentVars, an: Analysis) -> bool:
    if comp.kind == "lps":
        return True
    if len(scc_condense(comp.graph).components) != 1:
        return False
    for k in range(comp.graph.dim):
        if comp.u[k] is OMEGA and an.bounded(cv.x[k]):
            return False
        if comp.v[k] is OMEGA and an.bounded(cv.y[k]):
            return False
    return True


def is_unbounded_component(comp: KlmComponent, cv: ComponentVars, an: Analysis) -> bool:
    return comp.kind == "lps" or all(not an.bounded(v) for v in cv.phi)


def is_3normal(xi: KlmSequence, an: Analysis | None = None, km_cap: int = 50_000) -> bool:
    an = an or analyze(xi)
    if an is None:
        return False
    for c, cv in zip(xi.components, an.cs.comps):
        if c.kind == "lps":
            continue
        if not (is_standard_component(c, cv, an) and is_unbounded_component(c, cv, an)):
            if cycle_space(c.graph).dim <= 2 and not c.graph.transitions:
                continue
            return False
        if not isinstance(pumpable(c.graph, c.u, c.v, ignore_rigid=True, cap=km_cap), Pumpable):
            return False
    return True


@dataclass(frozen=True)
class Witness:
    path: tuple[int, ...]  # input transition ids
    start: tuple[int, ...]
    end: tuple[int, ...]
    boundaries: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    r: int = 0


def _euler_path(g: VassGraph, start: str, end: str, counts: dict[int, int]) -> list[int]:
    """A path from ``start`` to ``end`` using each transition exactly ``counts[t]`` times.

    Hierholzer's algorithm on the multigraph; assumes balance and connectivity.
    """
    ts = g.transitions
    adj: dict[str, list[int]] = {s: [] for s in g.states}
    for t in sorted(counts):
        adj[ts[t].src].extend([t] * counts[t])
    for s in adj:
        adj[s].reverse()
    stack = [(start, None)]
    out = []
    while stack:
        s, via = stack[-1]
        if adj[s]:
            t = adj[s].pop()
            stack.append((ts[t].dst, t))
        else:
            stack.pop()
            if via is not None:
                out.append(via)
    out.reverse()
    if len(out) != sum(counts.values()):
        raise InternalInconsistency("Parikh image is not realisable as one path")
    if out and (ts[out[0]].src != start or ts[out[-1]].dst != end):
        raise InternalInconsistency("Euler path has wrong endpoints")
    return out


def witness_from_normal(xi: KlmSequence, an: Analysis, km_cap: int = 50_000, max_doublings: int = 40) -> Witness:
    """Build a validated walk threading every component of a 3-normal sequence.

    Global solution ``f + K h0`` with ``K = 1 + r*r0``. A graph component takes
    ``psi^r . w . theta^r . chi^r`` where ``psi`` is a forward pump at the entry,
    ``chi`` a backward pump at the exit, ``w`` an Euler path with Parikh image
    ``f_phi + h0_phi`` and ``theta`` an Euler circuit at the exit with Parikh image
    ``r0 h0_phi - P(psi) - P(chi)``. ``r`` is doubled until the walk validates.
    """
    res = an.res
    f = min(res.minimal, key=lambda s: (sum(s), s))
    h0 = _support_cover(res.homogeneous, res.h0)
    comps = xi.components
    pumps = []
    for c in comps:
        if c.kind == "lps" or not c.graph.transitions:
            pumps.append(None)
            continue
        pm = pumpable(c.graph, c.u, c.v, ignore_rigid=True, cap=km_cap)
        if not isinstance(pm, Pumpable):
            raise InternalInconsistency("witness_from_normal called on a nonpumpable component")
        pumps.append(pm)
    # r0: large enough that r0*h0 dominates the pump Parikh images (plus one everywhere)
    r0 = 1
    maxT = max(max((c.graph.max_norm for c in comps), default=1), 1)
    for c, cv, pm in zip(comps, an.cs.comps, pumps):
        if pm is None:
            continue
        for t in range(len(c.graph.transitions)):
            need = pm.forward.count(t) + pm.backward.count(t) + 1
            r0 = max(r0, -(-need // h0[cv.phi[t]]))
        if not (c.u.is_finite() and c.v.is_finite()):
            # OMEGA coordinates grow with K and must absorb the drift of the pumps
            r0 = max(r0, (len(pm.forward) + len(pm.backward)) * maxT + 1)
    r = 1
    last_err = None
    for _ in range(max_doublings):
        K = 1 + r * r0
        sol = tuple(a + K * b for a, b in zip(f, h0))
        try:
            return _assemble(xi, an, sol, f, h0, pumps, r, r0)
        except DomainViolation as e:
            last_err = e
            r *= 2
    raise InternalInconsistency(f"no pumping factor validated the witness: {last_err}")


def _support_cover(basis, h0) -> tuple[int, ...]:
    """Sum of a few homogeneous basis elements with the same support as ``h0`` (greedy cover)."""
    need = {j for j, x in enumerate(h0) if x}
    out = [0] * len(h0)
    pool = sorted(basis, key=lambda s: (sum(s), s))
    while need:
        best = max(pool, key=lambda s: (len(need & {j for j, x in enumerate(s) if x}), -sum(s)))
        for j, x in enumerate(best):
            out[j] += x
        need -= {j for j, x in enumerate(best) if x}
    return tuple(out)


def _assemble(xi, an, sol, f, h0, pumps, r, r0) -> Witness:
    ids: list[int] = []
    bounds = []
    for i, (c, cv, pm) in enumerate(zip(xi.components, an.cs.comps, pumps)):
        x = tuple(sol[j] for j in cv.x)
        y = tuple(sol[j] for j in cv.y)
        g = c.graph
        ts = g.transitions
        if c.kind == "lps":
            lsol = LpsSolution(x, y, tuple(sol[j] for j in cv.phi))
            path = c.scheme.instantiate(lsol.phi)
            local = list(path.ids)
        elif not ts:
            local = []
        else:
            phi = [sol[j] for j in cv.phi]
            base = [f[j] + h0[j] for j in cv.phi]
            theta = {t: r0 * h0[cv.phi[t]] - pm.forward.count(t) - pm.backward.count(t)
                     for t in range(len(ts))}
            mid = _euler_path(g, c.p, c.q, {t: base[t] for t in range(len(ts)) if base[t]})
            circ = _euler_path(g, c.q, c.q, {t: n for t, n in theta.items() if n})
            local = list(pm.forward) * r + mid + circ * r + list(pm.backward) * r
            counts = [0] * len(ts)
            for t in local:
                counts[t] += 1
            if counts != phi:
                raise InternalInconsistency("assembled Parikh image differs from the solution")
        end = run_path(Configuration(c.p, x), Path(g, tuple(local), c.p), Domain.NAT)
        if end != Configuration(c.q, y):
            raise InternalInconsistency(f"component {i} walk ends at {end}, expected {c.q}{y}")
        bounds.append((x, y))
        ids.extend(ts[t].origin for t in local)
        if i < len(xi.connectors):
            ids.append(xi.connectors[i].origin)
    return Witness(tuple(ids), bounds[0][0], bounds[-1][1], tuple(bounds), r)
