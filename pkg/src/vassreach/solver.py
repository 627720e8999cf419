"""The 3-dimensional reachability driver: depth-first backtracking over KLM rewrites."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Sequence

from .core import Configuration, Domain, ExtVector, Path, VassGraph, cycle_space, rank, rigid_dims, run_path, scc_condense
from .coverability import Pumpable, pumpable
from .diophantine import DEFAULT_NODE_CAP
from .eff2d import eff2d_reach
from .errors import DomainViolation, InternalInconsistency, ResourceLimit
from .klm import (KlmComponent, KlmSequence, Witness, analyze, decompose_bounded, klm_rank,
                  linearize, worst_case_band_bound, reduce_component, reduction_choice, rigid_clean,
                  saturate, trim, witness_from_normal)
from .lps import enumerate_lps
from .oracle import bfs_oracle

REACHABLE = "Reachable"
UNREACHABLE = "UnreachableProven"
UNKNOWN = "Unknown"

# witness length is checked against |xi|^(C |xi|)
WITNESS_SIZE_C = 1


@dataclass(frozen=True)
class SolverConfig:
    c: int = 3                  # exponent of the pump constants used by the 2-dim region plan
    lps_length: int = 4         # scheme length bound when replacing a component by a scheme
    lps_max_cycles: int = 2
    fast_length: int = 6        # scheme bounds of the effectively 2-dim fast path
    fast_max_cycles: int = 2
    band_cap: int = 64          # largest reduction band
    km_cap: int = 50_000        # coverability nodes
    dio_cap: int = DEFAULT_NODE_CAP
    depth_cap: int = 200
    node_cap: int = 20_000      # search nodes overall
    branch_cap: int = 5_000     # children of a single rewrite
    oracle_box: int = 40
    seed: int = 0               # 0 keeps generation order among equally ranked branches
    fast_path: bool = True
    cross_check: bool = False

    def __post_init__(self):
        for name in ("lps_length", "lps_max_cycles", "band_cap", "km_cap", "dio_cap", "depth_cap",
                     "node_cap", "branch_cap", "oracle_box"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.c < 0:
            raise ValueError("c must be nonnegative")


@dataclass
class Stats:
    nodes: int = 0
    systems_solved: int = 0
    max_size: int = 0
    max_depth: int = 0
    max_rewrites: int = 0  # decompose/reduce steps on one branch
    rank_checks: int = 0  # decompose/reduce children verified to lower the rank
    cap_hits: list = field(default_factory=list)
    steps: dict = field(default_factory=dict)
    route: str = ""

    def as_dict(self) -> dict:
        return {"nodes": self.nodes, "systems_solved": self.systems_solved, "max_size": self.max_size,
                "max_depth": self.max_depth, "max_rewrites": self.max_rewrites, "rank_checks": self.rank_checks,
                "cap_hits": list(self.cap_hits), "steps": dict(sorted(self.steps.items())),
                "route": self.route}


@dataclass(frozen=True)
class ReachResult:
    decision: str
    witness: tuple[int, ...] | None
    start: Configuration
    end: Configuration
    stats: dict
    bound_relative: bool = False
    normal_form: str = ""  # the 3-normal sequence the witness came from

    @property
    def reachable(self) -> bool:
        return self.decision == REACHABLE


def _ordered(children, cfg: SolverConfig):
    """Rank-decrease-greedy, then size-ascending; ties keep generation order (or a seeded shuffle)."""
    keyed = [(klm_rank(x), x.size(), i, x) for i, x in enumerate(children)]
    if cfg.seed:
        rng = random.Random(cfg.seed)
        keyed = [(r, s, rng.random(), x) for r, s, _, x in keyed]
    keyed.sort(key=lambda e: e[:3])
    return [x for *_, x in keyed]


def _take(gen, cap):
    out = []
    for x in gen:
        out.append(x)
        if len(out) > cap:
            raise ResourceLimit(f"a rewrite produced more than {cap} branches")
    return out


def expand(xi: KlmSequence, cfg: SolverConfig, stats: Stats):
    """One rewrite of ``xi``: ``(kind, children)``, or ``("normal", analysis)`` when 3-normal.

    An empty child list prunes the branch.
    """
    an = analyze(xi, cfg.dio_cap)
    stats.systems_solved += 1
    if an is None:
        return "unsat", []
    sats = saturate(xi, an)
    if sats != [xi]:
        return "saturate", sats
    comps = xi.components
    for i, c in enumerate(comps):
        if c.kind != "graph":
            continue
        t = trim(c)
        if t is None:
            return "trim", []
        if t is not c:
            return "trim", [xi.with_component(i, t)]
        if len(scc_condense(c.graph).components) != 1:
            return "standardize", _take(linearize(xi, i), cfg.branch_cap)
        rc = rigid_clean(c)
        if rc is None:
            return "rigid", []
        if rc is not c:
            return "rigid", [xi.with_component(i, rc)]
    for i, c in enumerate(comps):
        if c.kind == "graph" and c.graph.transitions and not c.declined and cycle_space(c.graph).dim <= 2:
            schemes = _take(enumerate_lps(c.graph, c.p, c.q, cfg.lps_length, cfg.lps_max_cycles),
                            cfg.branch_cap)
            kids = [xi.with_component(i, replace(c, scheme=s)) for s in schemes if s.n_cycles]
            kids.append(xi.with_component(i, replace(c, declined=True)))
            return "scheme", kids
    for i, c in enumerate(comps):
        if c.kind == "graph" and an.component_bounded_edges(i):
            return "decompose", _take(decompose_bounded(xi, i, an, cfg.branch_cap), cfg.branch_cap)
    for i, c in enumerate(comps):
        if c.kind != "graph" or not c.graph.transitions:
            continue
        pm = pumpable(c.graph, c.u, c.v, ignore_rigid=True, cap=cfg.km_cap)
        if isinstance(pm, Pumpable):
            continue
        choice = reduction_choice(c, pm.dims, cfg.km_cap)
        if choice is None:
            raise ResourceLimit(f"no uniformly bounded coordinate; band {worst_case_band_bound(xi)} exceeds cap")
        k, bound = choice
        if bound > cfg.band_cap:
            raise ResourceLimit(f"reduction band {bound} exceeds cap {cfg.band_cap}")
        return "reduce", list(reduce_component(xi, i, k, bound))
    return "normal", an


def klmst3(xi0: KlmSequence, cfg: SolverConfig = SolverConfig(), stats: Stats | None = None):
    """Depth-first search for a 3-normal descendant of ``xi0``.

    Returns ``(decision, witness, normal_sequence)``; the witness is a path of
    input transition ids. Any cap hit turns exhaustion into ``Unknown``.
    """
    stats = stats if stats is not None else Stats()
    n_trans0 = sum(len(c.graph.transitions) for c in xi0.components)
    stack = [iter([(xi0, 0, 0)])]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            continue
        xi, depth, rewrites = nxt
        stats.nodes += 1
        stats.max_depth = max(stats.max_depth, depth)
        stats.max_size = max(stats.max_size, xi.size())
        stats.max_rewrites = max(stats.max_rewrites, rewrites)
        if stats.nodes > cfg.node_cap:
            stats.cap_hits.append("node_cap")
            break
        if depth > cfg.depth_cap:
            stats.cap_hits.append("depth_cap")
            continue
        try:
            kind, out = expand(xi, cfg, stats)
        except ResourceLimit as e:
            stats.cap_hits.append(str(e))
            continue
        stats.steps[kind] = stats.steps.get(kind, 0) + 1
        if kind == "normal":
            w = witness_from_normal(xi, out, cfg.km_cap)
            size = xi.size()
            if len(w.path) > 1 and math.log(len(w.path)) > WITNESS_SIZE_C * size * math.log(size):
                raise InternalInconsistency("witness exceeds the size bound")
            return REACHABLE, w, xi
        if kind in ("decompose", "reduce"):
            r0 = klm_rank(xi)
            for child in out:
                if not klm_rank(child) < r0:
                    raise InternalInconsistency(f"{kind} did not decrease the rank")
                stats.rank_checks += 1
            if rewrites + 1 > 2 * max(n_trans0, 1):
                stats.cap_hits.append("rewrite_depth")
                continue
        step = 1 if kind in ("decompose", "reduce") else 0
        stack.append(iter([(x, depth + 1, rewrites + step) for x in _ordered(out, cfg)]))
    return (UNKNOWN if stats.cap_hits else UNREACHABLE), None, None


def _validate(graph: VassGraph, p, m, q, n, ids) -> None:
    end = run_path(Configuration(p, tuple(m)), Path(graph, tuple(ids), p), Domain.NAT)
    if end != Configuration(q, tuple(n)):
        raise InternalInconsistency(f"witness ends at {end}, expected {q}{tuple(n)}")


def reach3(graph: VassGraph, p: str, m: Sequence[int], q: str, n: Sequence[int],
           cfg: SolverConfig = SolverConfig()) -> ReachResult:
    """Decide ``p(m) -> q(n)`` in a 3-VASS; effectively <= 2-dim inputs try scheme search first."""
    m, n = tuple(m), tuple(n)
    g = graph.with_endpoints(p, q)
    stats = Stats()
    start, end = Configuration(p, m), Configuration(q, n)
    if cfg.fast_path and cycle_space(g).dim <= 2:
        try:
            r = eff2d_reach(g, p, m, q, n, cfg.fast_length, cfg.fast_max_cycles, cfg.c, cfg.dio_cap)
        except ResourceLimit as e:
            stats.cap_hits.append(str(e))
            r = None
        if r is not None and r.found:
            ids = tuple(r.path.ids)
            _validate(graph, p, m, q, n, ids)
            stats.route = f"eff2d:{r.route}"
            stats.cap_hits.clear()
            return ReachResult(REACHABLE, ids, start, end, stats.as_dict(), False, repr(r.scheme))
    stats.route = "klmst3"
    xi0 = KlmSequence.single(m, g, n)
    decision, w, normal = klmst3(xi0, cfg, stats)
    ids = None
    if w is not None:
        ids = tuple(w.path)
        _validate(graph, p, m, q, n, ids)
    if cfg.cross_check:
        orc = bfs_oracle(graph, p, m, q, n, cfg.oracle_box)
        if orc.exact and orc.reachable != (decision == REACHABLE) and decision != UNKNOWN:
            raise InternalInconsistency(f"solver says {decision}, exact oracle says {orc.verdict}")
    return ReachResult(decision, ids, start, end, stats.as_dict(), decision == UNKNOWN,
                       normal.serialize() if normal else "")
