"""Graph and vector substrate: VASS digraphs, omega-vectors, paths, cycle spaces."""
from __future__ import annotations

import enum
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import DomainViolation
from .linalg import in_span, span_basis


def _per_graph(fn):
    """Cache a pure function of a (frozen) graph on the graph instance."""
    key = "_memo_" + fn.__name__

    def wrapper(graph):
        memo = graph.__dict__.get(key)
        if memo is None:
            memo = fn(graph)
            object.__setattr__(graph, key, memo)
        return memo

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


class _Omega:
    """The unbounded value of N_omega. Absorbs addition and subtraction."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "w"

    def __reduce__(self):
        return "OMEGA"

    def __hash__(self):
        return hash("omega")


OMEGA = _Omega()


def is_omega(x) -> bool:
    return x is OMEGA


class ExtVector(tuple):
    """A vector over N extended with OMEGA."""

    def __new__(cls, entries: Iterable = ()):
        vals = []
        for e in entries:
            if e is OMEGA or (isinstance(e, str) and e in ("w", "ω")):
                vals.append(OMEGA)
            else:
                e = int(e)
                if e < 0:
                    raise ValueError(f"negative entry {e} in ExtVector")
                vals.append(e)
        return super().__new__(cls, vals)

    @classmethod
    def omega(cls, d: int) -> "ExtVector":
        return cls([OMEGA] * d)

    @property
    def dim(self) -> int:
        return len(self)

    def norm1(self) -> int:
        return sum(x for x in self if x is not OMEGA)

    def is_finite(self) -> bool:
        return all(x is not OMEGA for x in self)

    def finite_dims(self) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self) if x is not OMEGA)

    def omega_dims(self) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self) if x is OMEGA)

    def sqsubseteq(self, other: Sequence) -> bool:
        """``self`` is below ``other``: each entry of other is equal or omega."""
        return len(self) == len(other) and all(
            o is OMEGA or o == s for s, o in zip(self, other))

    def matches(self, loc: Sequence[int]) -> bool:
        """A concrete location ``loc`` lies below this constraint."""
        return ExtVector(loc).sqsubseteq(self)

    def with_entry(self, i: int, value) -> "ExtVector":
        vals = list(self)
        vals[i] = value
        return ExtVector(vals)

    def __repr__(self):
        return "(" + ",".join(repr(x) if x is OMEGA else str(x) for x in self) + ")"


def ext_add(m: Sequence, a: Sequence[int]) -> tuple:
    return tuple(x if x is OMEGA else x + y for x, y in zip(m, a))


# -- graphs -----------------------------------------------------------------

@dataclass(frozen=True)
class Transition:
    id: int
    src: str
    dst: str
    delta: tuple[int, ...]
    name: str = ""
    origin: int = -1  # id in the input VASS this edge was derived from

    @property
    def norm1(self) -> int:
        return sum(abs(x) for x in self.delta)


@dataclass(frozen=True)
class VassGraph:
    """A d-VASS ``(Q, T, q_in, q_out)``. Transition ids are positions in ``transitions``."""

    dim: int
    states: tuple[str, ...]
    transitions: tuple[Transition, ...]
    q_in: str
    q_out: str

    def __post_init__(self):
        sset = set(self.states)
        if len(sset) != len(self.states):
            raise ValueError("duplicate state names")
        if self.q_in not in sset or self.q_out not in sset:
            raise ValueError("q_in/q_out must be states")
        for i, t in enumerate(self.transitions):
            if t.id != i:
                raise ValueError("transition ids must be 0..k-1 in order")
            if t.src not in sset or t.dst not in sset:
                raise ValueError(f"transition {t.name or i} uses an unknown state")
            if len(t.delta) != self.dim:
                raise ValueError(f"transition {t.name or i} has wrong arity")

    @classmethod
    def build(cls, dim, states, transitions, q_in=None, q_out=None) -> "VassGraph":
        """``transitions``: iterable of ``(name, src, dst, delta)``."""
        states = tuple(states)
        ts = []
        for i, (name, src, dst, delta) in enumerate(transitions):
            ts.append(Transition(i, src, dst, tuple(int(x) for x in delta), str(name), i))
        return cls(dim, states, tuple(ts),
                   states[0] if q_in is None else q_in,
                   states[0] if q_out is None else q_out)

    # sizes
    @cached_property
    def norm_T(self) -> int:
        return sum(t.norm1 for t in self.transitions)

    @cached_property
    def max_norm(self) -> int:
        return max((t.norm1 for t in self.transitions), default=0)

    @property
    def size(self) -> int:
        return len(self.states) + self.norm_T

    @cached_property
    def out_edges(self) -> Mapping[str, tuple[Transition, ...]]:
        out = {s: [] for s in self.states}
        for t in self.transitions:
            out[t.src].append(t)
        return {s: tuple(v) for s, v in out.items()}

    @cached_property
    def in_edges(self) -> Mapping[str, tuple[Transition, ...]]:
        inn = {s: [] for s in self.states}
        for t in self.transitions:
            inn[t.dst].append(t)
        return {s: tuple(v) for s, v in inn.items()}

    def by_name(self, name: str) -> Transition:
        for t in self.transitions:
            if t.name == name:
                return t
        raise KeyError(name)

    def with_endpoints(self, q_in: str, q_out: str) -> "VassGraph":
        return VassGraph(self.dim, self.states, self.transitions, q_in, q_out)

    def subgraph(self, states, edge_ids, q_in, q_out) -> "VassGraph":
        """Induced-style subgraph on ``states`` keeping the listed edges (relabelled ids)."""
        keep = set(states)
        st = tuple(s for s in self.states if s in keep) if not isinstance(states, tuple) else states
        ts = []
        for tid in sorted(edge_ids):
            t = self.transitions[tid]
            if t.src in keep and t.dst in keep:
                ts.append(Transition(len(ts), t.src, t.dst, t.delta, t.name, t.origin))
        return VassGraph(self.dim, st, tuple(ts), q_in, q_out)

    def reversed(self) -> "VassGraph":
        ts = tuple(Transition(t.id, t.dst, t.src, tuple(-x for x in t.delta), t.name, t.origin)
                   for t in self.transitions)
        return VassGraph(self.dim, self.states, ts, self.q_out, self.q_in)

    def digraph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.states)
        for t in self.transitions:
            g.add_edge(t.src, t.dst, key=t.id)
        return g

    def reachable_from(self, s: str) -> set[str]:
        seen = {s}
        todo = [s]
        while todo:
            x = todo.pop()
            for t in self.out_edges[x]:
                if t.dst not in seen:
                    seen.add(t.dst)
                    todo.append(t.dst)
        return seen

    def coreachable_to(self, s: str) -> set[str]:
        seen = {s}
        todo = [s]
        while todo:
            x = todo.pop()
            for t in self.in_edges[x]:
                if t.src not in seen:
                    seen.add(t.src)
                    todo.append(t.src)
        return seen


# -- paths and configurations ---------------------------------------------------

@dataclass(frozen=True)
class Path:
    graph: VassGraph
    ids: tuple[int, ...] = ()
    start: str | None = None  # needed for the empty path

    def __post_init__(self):
        ts = self.graph.transitions
        for a, b in zip(self.ids, self.ids[1:]):
            if ts[a].dst != ts[b].src:
                raise ValueError(f"path not chained at transitions {a},{b}")
        if self.ids and self.start is not None and ts[self.ids[0]].src != self.start:
            raise ValueError("path does not leave its start state")

    @property
    def source(self) -> str:
        if self.ids:
            return self.graph.transitions[self.ids[0]].src
        if self.start is None:
            raise ValueError("empty path without a start state")
        return self.start

    @property
    def target(self) -> str:
        if self.ids:
            return self.graph.transitions[self.ids[-1]].dst
        return self.source

    def __len__(self):
        return len(self.ids)

    def __add__(self, other: "Path") -> "Path":
        return Path(self.graph, self.ids + other.ids, self.start if self.ids or self.start else other.start)


def displacement(path: Path) -> tuple[int, ...]:
    d = [0] * path.graph.dim
    for tid in path.ids:
        for k, x in enumerate(path.graph.transitions[tid].delta):
            d[k] += x
    return tuple(d)


def parikh(path: Path) -> dict[int, int]:
    return dict(Counter(path.ids))


def parikh_displacement(graph: VassGraph, phi: Mapping[int, int]) -> tuple[int, ...]:
    d = [0] * graph.dim
    for tid, n in phi.items():
        for k, x in enumerate(graph.transitions[tid].delta):
            d[k] += n * x
    return tuple(d)


class Domain(enum.Enum):
    NAT = "N"
    INT = "Z"
    NAT_OMEGA = "Nw"


@dataclass(frozen=True)
class Configuration:
    state: str
    location: tuple

    def __repr__(self):
        return f"{self.state}{ExtVector(self.location) if self._nonneg() else self.location}"

    def _nonneg(self):
        return all(x is OMEGA or x >= 0 for x in self.location)


def step(graph: VassGraph, c: Configuration, tid: int, domain: Domain = Domain.NAT) -> Configuration:
    t = graph.transitions[tid]
    if t.src != c.state:
        raise ValueError(f"transition {t.name or tid} does not leave state {c.state}")
    if len(c.location) != graph.dim:
        raise ValueError("location dimension differs from graph dimension")
    if domain is Domain.NAT_OMEGA:
        loc = ext_add(c.location, t.delta)
    else:
        if any(x is OMEGA for x in c.location):
            raise ValueError("omega entries need the N_omega domain")
        loc = tuple(x + y for x, y in zip(c.location, t.delta))
    if domain is not Domain.INT and any(x is not OMEGA and x < 0 for x in loc):
        raise DomainViolation(f"{c} --{t.name or tid}--> {loc} leaves the domain")
    return Configuration(t.dst, loc)


def run_path(c: Configuration, path: Path, domain: Domain = Domain.NAT) -> Configuration:
    if path.ids and path.graph.transitions[path.ids[0]].src != c.state:
        raise ValueError("path does not start at the configuration's state")
    if not path.ids and path.start is not None and path.start != c.state:
        raise ValueError("path does not start at the configuration's state")
    if domain is Domain.NAT and all(x is not OMEGA for x in c.location):
        return _run_nat(c, path)
    for i, tid in enumerate(path.ids):
        try:
            c = step(path.graph, c, tid, domain)
        except DomainViolation as e:
            raise DomainViolation(str(e), index=i) from None
    return c


def _run_nat(c: Configuration, path: Path) -> Configuration:
    ts = path.graph.transitions
    if len(c.location) != path.graph.dim:
        raise ValueError("location dimension differs from graph dimension")
    state, cur = c.state, list(c.location)
    for i, tid in enumerate(path.ids):
        t = ts[tid]
        if t.src != state:
            raise ValueError(f"transition {t.name or tid} does not leave state {state}")
        for k, x in enumerate(t.delta):
            cur[k] += x
        if min(cur) < 0:
            raise DomainViolation(f"step {i} ({t.name or tid}) reaches {tuple(cur)}", index=i)
        state = t.dst
    return Configuration(state, tuple(cur))


def is_walk(graph: VassGraph, state: str, loc, ids: Sequence[int]) -> bool:
    """Fast validity check of a transition sequence over N^d."""
    ts = graph.transitions
    cur = list(loc)
    for tid in ids:
        t = ts[tid]
        if t.src != state:
            return False
        for k, x in enumerate(t.delta):
            cur[k] += x
            if cur[k] < 0:
                return False
        state = t.dst
    return True


# -- components, cycle spaces, ranks ------------------------------------------------

@dataclass(frozen=True)
class Condensation:
    components: tuple[frozenset, ...]  # topological order
    comp_of: Mapping[str, int]
    dag: frozenset  # pairs (i, j) of component indices with an edge i -> j

    def orders(self):
        """All topological orders of the condensation."""
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.components)))
        g.add_edges_from(self.dag)
        return nx.all_topological_sorts(g)


@_per_graph
def scc_condense(graph: VassGraph) -> Condensation:
    g = nx.DiGraph()
    g.add_nodes_from(graph.states)
    g.add_edges_from((t.src, t.dst) for t in graph.transitions)
    sccs = list(nx.strongly_connected_components(g))
    cond = nx.condensation(g, sccs)
    order_index = {s: i for i, s in enumerate(graph.states)}
    # deterministic topological order: lexicographic by the smallest state index
    topo = list(nx.lexicographical_topological_sort(
        cond, key=lambda n: min(order_index[s] for s in sccs[n])))
    rank_of = {n: i for i, n in enumerate(topo)}
    comps = tuple(frozenset(sccs[n]) for n in topo)
    comp_of = {s: rank_of[cond.graph["mapping"][s]] for s in graph.states}
    dag = frozenset((rank_of[a], rank_of[b]) for a, b in cond.edges)
    return Condensation(comps, comp_of, dag)


def is_strongly_connected(graph: VassGraph) -> bool:
    return len(scc_condense(graph).components) == 1


def _potentials_in(graph: VassGraph, comp: frozenset, edges) -> dict[str, tuple[int, ...]]:
    """Spanning-tree potentials of the states in one component."""
    root = min(comp, key=graph.states.index)
    pot = {root: (0,) * graph.dim}
    todo = deque([root])
    adj: dict[str, list] = {s: [] for s in comp}
    for t in edges:
        adj[t.src].append((t.dst, t.delta))
        adj[t.dst].append((t.src, tuple(-x for x in t.delta)))
    while todo:
        s = todo.popleft()
        for nb, d in adj[s]:
            if nb not in pot:
                pot[nb] = tuple(a + b for a, b in zip(pot[s], d))
                todo.append(nb)
    return pot


@dataclass(frozen=True)
class CycleSpace:
    basis: tuple[tuple[int, ...], ...]
    dim_ambient: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v) -> bool:
        return in_span(self.basis, v)


def _component_cycle_vectors(graph: VassGraph, comp: frozenset):
    edges = [t for t in graph.transitions if t.src in comp and t.dst in comp]
    if not edges:
        return []
    pot = _potentials_in(graph, comp, edges)
    vecs = []
    for t in edges:
        v = tuple(ps + d - pd for ps, d, pd in zip(pot[t.src], t.delta, pot[t.dst]))
        if any(v):
            vecs.append(v)
    return vecs


@_per_graph
def cycle_space(graph: VassGraph) -> CycleSpace:
    """Q-span V_G of all cycle displacements, from fundamental cycles per SCC."""
    vecs = []
    for comp in scc_condense(graph).components:
        vecs.extend(_component_cycle_vectors(graph, comp))
    return CycleSpace(tuple(span_basis(vecs)), graph.dim)


def effective_dim(graph: VassGraph) -> int:
    return cycle_space(graph).dim


def edge_cycle_dim(graph: VassGraph, tid: int) -> int:
    """dim V_G(t). Within a strongly connected component every edge sees the whole component space."""
    cond = scc_condense(graph)
    t = graph.transitions[tid]
    ci = cond.comp_of[t.src]
    if cond.comp_of[t.dst] != ci:
        return 0
    return len(span_basis(_component_cycle_vectors(graph, cond.components[ci])))


@dataclass(frozen=True, order=True)
class RankVector:
    """Counts ``(r_d, ..., r_0)``; compared lexicographically from r_d down."""

    counts: tuple[int, ...]

    @classmethod
    def zero(cls, d: int) -> "RankVector":
        return cls((0,) * (d + 1))

    def __add__(self, other: "RankVector") -> "RankVector":
        return RankVector(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __iter__(self):
        return iter(self.counts)

    def __repr__(self):
        return f"RankVector{self.counts}"


@_per_graph
def rank(graph: VassGraph) -> RankVector:
    d = graph.dim
    counts = [0] * (d + 1)
    cond = scc_condense(graph)
    comp_dim = {}
    for i, comp in enumerate(cond.components):
        comp_dim[i] = len(span_basis(_component_cycle_vectors(graph, comp)))
    for t in graph.transitions:
        ci = cond.comp_of[t.src]
        k = comp_dim[ci] if cond.comp_of[t.dst] == ci else 0
        counts[d - k] += 1
    return RankVector(tuple(counts))


@_per_graph
def rigid_dims(graph: VassGraph) -> tuple[int, ...]:
    """Coordinates on which every cycle has zero displacement."""
    basis = cycle_space(graph).basis
    return tuple(k for k in range(graph.dim) if all(b[k] == 0 for b in basis))


def state_potentials(graph: VassGraph, root: str | None = None) -> dict[str, tuple[int, ...]]:
    """Displacement of any path from ``root`` to each reachable state.

    Only meaningful on coordinates in :func:`rigid_dims` of a strongly connected graph.
    """
    root = graph.q_in if root is None else root
    pot = {root: (0,) * graph.dim}
    todo = deque([root])
    while todo:
        s = todo.popleft()
        for t in graph.out_edges[s]:
            if t.dst not in pot:
                pot[t.dst] = tuple(a + b for a, b in zip(pot[s], t.delta))
                todo.append(t.dst)
        for t in graph.in_edges[s]:
            if t.src not in pot:
                pot[t.src] = tuple(a - b for a, b in zip(pot[s], t.delta))
                todo.append(t.src)
    return pot


# -- zones -----------------------------------------------------------------------

GE, LE = ">=", "<="
ZoneSignature = tuple  # tuple of GE/LE, one per coordinate


def in_zone(v: Sequence[int], z: ZoneSignature) -> bool:
    return all((x >= 0) if s == GE else (x <= 0) for x, s in zip(v, z))


def zone_of(v: Sequence[int]) -> frozenset:
    """All zone signatures satisfied by ``v``; zero entries satisfy both signs."""
    choices = [(GE, LE) if x == 0 else ((GE,) if x > 0 else (LE,)) for x in v]
    return frozenset(product(*choices))


def canonical_zone(v: Sequence[int]) -> ZoneSignature:
    return tuple(LE if x < 0 else GE for x in v)


def all_zones(d: int):
    return list(product((GE, LE), repeat=d))
