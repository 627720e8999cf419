"""Linear path schemes ``alpha_0 beta_1* alpha_1 ... beta_n* alpha_n`` and their systems."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .core import (OMEGA, Configuration, Domain, Path, VassGraph, in_zone, run_path,
                   zone_of)
from .diophantine import DEFAULT_NODE_CAP, DiophantineSystem, SystemBuilder, find_solution
from .errors import DomainViolation, InternalInconsistency, PreconditionUnmet, ResourceLimit


def _delta(graph: VassGraph, ids: Sequence[int]) -> tuple[int, ...]:
    d = [0] * graph.dim
    for tid in ids:
        for k, x in enumerate(graph.transitions[tid].delta):
            d[k] += x
    return tuple(d)


@dataclass(frozen=True)
class LinearPathScheme:
    graph: VassGraph
    start: str
    alphas: tuple[tuple[int, ...], ...]
    betas: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if len(self.alphas) != len(self.betas) + 1:
            raise ValueError("a scheme has one more path than cycles")
        ts = self.graph.transitions
        state = self.start
        for i, alpha in enumerate(self.alphas):
            if i > 0:
                beta = self.betas[i - 1]
                if not beta:
                    raise ValueError("cycles must be nonempty")
                state = self._walk(beta, state)
                if state != self._junction(i - 1):
                    raise ValueError(f"beta_{i} is not a cycle at its junction")
            state = self._walk(alpha, state)

    def _walk(self, ids, state):
        for tid in ids:
            t = self.graph.transitions[tid]
            if t.src != state:
                raise ValueError(f"scheme not chained at transition {t.name or tid}")
            state = t.dst
        return state

    def _junction(self, i: int) -> str:
        """State where ``beta_{i+1}`` is anchored (end of ``alpha_i``)."""
        state = self.start
        for k in range(i + 1):
            if k > 0:
                state = self._walk(self.betas[k - 1], state)
            state = self._walk(self.alphas[k], state)
        return state

    @property
    def junctions(self) -> tuple[str, ...]:
        return tuple(self._junction(i) for i in range(len(self.betas)))

    @property
    def end(self) -> str:
        return self._junction(len(self.alphas) - 1)

    @property
    def n_cycles(self) -> int:
        return len(self.betas)

    @property
    def length(self) -> int:
        return sum(map(len, self.alphas)) + sum(map(len, self.betas))

    def alpha_delta(self, i: int):
        return _delta(self.graph, self.alphas[i])

    def beta_delta(self, i: int):
        """Displacement of ``beta_{i+1}`` (0-based index into ``betas``)."""
        return _delta(self.graph, self.betas[i])

    def instantiate(self, exps: Sequence[int]) -> Path:
        if len(exps) != len(self.betas):
            raise ValueError("one exponent per cycle")
        ids: list[int] = list(self.alphas[0])
        for beta, e, alpha in zip(self.betas, exps, self.alphas[1:]):
            ids.extend(beta * e)
            ids.extend(alpha)
        return Path(self.graph, tuple(ids), self.start)

    def sort_key(self):
        toks = [(0, t) for t in self.alphas[0]]
        for beta, alpha in zip(self.betas, self.alphas[1:]):
            toks.append((1, beta))
            toks.extend((0, t) for t in alpha)
        return (self.length, tuple(toks))

    def serialize(self, counts: Sequence[int] | None = None) -> str:
        def ids(seq):
            return "[" + ", ".join(str(self.graph.transitions[t].origin if self.graph.transitions[t].origin >= 0 else t)
                                   for t in seq) + "]"

        parts = [f"alpha: {ids(self.alphas[0])}"]
        for i, (beta, alpha) in enumerate(zip(self.betas, self.alphas[1:])):
            cnt = "*" if counts is None else str(counts[i])
            parts.append(f"beta: {ids(beta)} x {cnt}")
            parts.append(f"alpha: {ids(alpha)}")
        return " ; ".join(parts)

    def __repr__(self):
        name = lambda t: self.graph.transitions[t].name or str(t)
        parts = [" ".join(map(name, self.alphas[0]))]
        for beta, alpha in zip(self.betas, self.alphas[1:]):
            parts.append("(" + " ".join(map(name, beta)) + ")*")
            parts.append(" ".join(map(name, alpha)))
        return f"LPS[{' '.join(p for p in parts if p) or 'eps'}]"


# -- constants ------------------------------------------------------------------

@dataclass(frozen=True)
class PumpConstants:
    """``D = max||T|| * (|Q| + ||T||)^c``; the high region is ``[2D, inf)^d``."""

    c: int
    D: int
    length_bound: int

    @classmethod
    def of(cls, graph: VassGraph, c: int) -> "PumpConstants":
        base = len(graph.states) + graph.norm_T
        return cls(c, graph.max_norm * base ** c, base ** c)

    def in_high_region(self, m: Sequence[int]) -> bool:
        return all(x is OMEGA or x >= 2 * self.D for x in m)


def is_zigzag_free(scheme: LinearPathScheme, zone) -> bool:
    return all(in_zone(scheme.beta_delta(i), zone) for i in range(scheme.n_cycles))


def zigzag_walk_guarantee(scheme: LinearPathScheme, m: Sequence[int], n: Sequence[int], c: int) -> bool:
    """Check the hypotheses under which every instantiation from ``m`` to ``n`` is a walk.

    Both endpoints must lie in the high region, the scheme must be short enough
    for exponent ``c``, and all cycles must share a zone of ``n - m``.
    """
    pc = PumpConstants.of(scheme.graph, c)
    if pc.D == 0 and scheme.length > 0:
        raise PreconditionUnmet("degenerate constants (no transition moves)")
    if not (pc.in_high_region(m) and pc.in_high_region(n)):
        raise PreconditionUnmet(f"endpoints not in [2D, inf)^d with D={pc.D}")
    if scheme.length > pc.length_bound:
        raise PreconditionUnmet(f"scheme longer than {pc.length_bound}")
    diff = tuple(b - a for a, b in zip(m, n))
    if not any(is_zigzag_free(scheme, z) for z in zone_of(diff)):
        raise PreconditionUnmet("cycles do not share the zone of n - m")
    return True


# -- the scheme system ------------------------------------------------------------

@dataclass(frozen=True)
class LpsLayout:
    x: tuple[int, ...]
    y: tuple[int, ...]
    phi: tuple[int, ...]
    z: Mapping[str, int]


def add_lps_rows(b: SystemBuilder, scheme: LinearPathScheme, x: Sequence[int], y: Sequence[int],
                 prefix: str = "", homogeneous: bool = False) -> LpsLayout:
    """Emit the scheme equations over existing endpoint variables ``x`` and ``y``.

    Intermediate-location variables: ``z1[k,l]`` after ``l`` steps of ``alpha_k``;
    ``z2[k,l]`` after ``l`` steps of the first lap of ``beta_k``; ``z3[k,l]`` after
    ``l`` steps of the last lap. Nonnegativity of the first and last lap implies
    nonnegativity of every middle lap by linearity.
    """
    g = scheme.graph
    d = g.dim
    phi = tuple(b.var(f"{prefix}phi[{i + 1}]") for i in range(scheme.n_cycles))
    zs: dict[str, int] = {}
    const = [0] * d  # sum of alpha displacements so far
    cyc: list[tuple[int, tuple[int, ...]]] = []  # (phi var, delta) of cycles so far

    def emit(name, offset):
        for c in range(d):
            zv = b.var(f"{prefix}{name}({c + 1})")
            zs[f"{name}({c + 1})"] = zv
            coeffs = [(zv, 1), (x[c], -1)] + [(pv, -dl[c]) for pv, dl in cyc]
            b.row(coeffs, 0 if homogeneous else const[c] + offset[c])

    ts = g.transitions
    for k, alpha in enumerate(scheme.alphas):
        if k > 0:
            beta = scheme.betas[k - 1]
            bd = scheme.beta_delta(k - 1)
            pre = [0] * d
            for l, tid in enumerate(beta, 1):
                pre = [a + b_ for a, b_ in zip(pre, ts[tid].delta)]
                emit(f"z2[{k},{l}]", pre)
            cyc.append((phi[k - 1], bd))
            suf = list(bd)
            for l, tid in enumerate(beta, 1):
                suf = [a - b_ for a, b_ in zip(suf, ts[tid].delta)]
                emit(f"z3[{k},{l}]", [-v for v in suf])
        pre = [0] * d
        emit(f"z1[{k},0]", pre)
        for l, tid in enumerate(alpha, 1):
            pre = [a + b_ for a, b_ in zip(pre, ts[tid].delta)]
            emit(f"z1[{k},{l}]", pre)
        const = [a + b_ for a, b_ in zip(const, pre)]
    for c in range(d):
        coeffs = [(y[c], 1), (x[c], -1)] + [(pv, -dl[c]) for pv, dl in cyc]
        b.row(coeffs, 0 if homogeneous else const[c])
    return LpsLayout(tuple(x), tuple(y), phi, zs)


def _pin(b: SystemBuilder, vars_, constraint, homogeneous):
    if constraint is None:
        return
    if len(constraint) != len(vars_):
        raise ValueError("constraint dimension mismatch")
    for v, c in zip(vars_, constraint):
        if c is not OMEGA:
            b.fix(v, 0 if homogeneous else int(c))


@dataclass(frozen=True)
class LpsSolution:
    x: tuple[int, ...]
    y: tuple[int, ...]
    phi: tuple[int, ...]
    z: Mapping[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class LpsSystem:
    scheme: LinearPathScheme
    system: DiophantineSystem
    layout: LpsLayout

    def decode(self, vec: Sequence[int]) -> LpsSolution:
        lay = self.layout
        return LpsSolution(tuple(vec[i] for i in lay.x), tuple(vec[i] for i in lay.y),
                           tuple(vec[i] for i in lay.phi), {k: vec[i] for k, i in lay.z.items()})

    def encode(self, sol: LpsSolution) -> tuple[int, ...]:
        vec = [0] * self.system.nvars
        lay = self.layout
        for idx, v in zip(lay.x + lay.y + lay.phi, sol.x + sol.y + sol.phi):
            vec[idx] = v
        for k, i in lay.z.items():
            vec[i] = sol.z[k]
        return tuple(vec)


def _build(scheme, m, n, homogeneous) -> LpsSystem:
    b = SystemBuilder()
    d = scheme.graph.dim
    x = tuple(b.var(f"x({c + 1})") for c in range(d))
    y = tuple(b.var(f"y({c + 1})") for c in range(d))
    lay = add_lps_rows(b, scheme, x, y, homogeneous=homogeneous)
    _pin(b, x, m, homogeneous)
    _pin(b, y, n, homogeneous)
    return LpsSystem(scheme, b.build(), lay)


def lps_system(scheme: LinearPathScheme, m=None, n=None) -> LpsSystem:
    """The scheme system with the finite entries of ``m`` and ``n`` pinned."""
    return _build(scheme, m, n, False)


def lps_homogeneous_system(scheme: LinearPathScheme, m=None, n=None) -> LpsSystem:
    return _build(scheme, m, n, True)


def assignment_of(scheme: LinearPathScheme, x: Sequence[int], exps: Sequence[int]) -> LpsSolution:
    """The assignment induced by running the instantiation with exponents ``exps`` from ``x``."""
    sysm = lps_system(scheme)
    lay = sysm.layout
    vec = [0] * sysm.system.nvars
    for i, v in zip(lay.x, x):
        vec[i] = v
    for i, e in zip(lay.phi, exps):
        vec[i] = e
    # every z row and the y row has the form var = x + const + sum phi*delta
    for coeffs, rhs in zip(sysm.system.A, sysm.system.r):
        lead = next(j for j in range(len(coeffs)) if coeffs[j] == 1 and j not in lay.x and j not in lay.phi)
        vec[lead] = rhs - sum(a * vec[j] for j, a in enumerate(coeffs) if j != lead)
    return sysm.decode(vec)


def solve_lps(scheme: LinearPathScheme, m, n, cap: int = DEFAULT_NODE_CAP) -> LpsSolution | None:
    sysm = lps_system(scheme, m, n)
    vec = find_solution(sysm.system, cap)
    return None if vec is None else sysm.decode(vec)


def quick_reject(scheme: LinearPathScheme, m: Sequence[int], n: Sequence[int]) -> bool:
    """Cheap necessary conditions for concrete endpoints; True means the system is unsatisfiable."""
    g = scheme.graph
    ts = g.transitions
    rest = [b - a for a, b in zip(m, n)]
    for i in range(len(scheme.alphas)):
        rest = [r - x for r, x in zip(rest, scheme.alpha_delta(i))]
    deltas = [scheme.beta_delta(i) for i in range(scheme.n_cycles)]
    for c, r in enumerate(rest):
        if r > 0 and not any(dl[c] > 0 for dl in deltas):
            return True
        if r < 0 and not any(dl[c] < 0 for dl in deltas):
            return True
    loc = list(m)
    for tid in scheme.alphas[0]:
        loc = [a + b for a, b in zip(loc, ts[tid].delta)]
        if min(loc) < 0:
            return True
    loc = list(n)
    for tid in reversed(scheme.alphas[-1]):
        if min(loc) < 0:
            return True
        loc = [a - b for a, b in zip(loc, ts[tid].delta)]
    return min(loc) < 0


def extract_walk(scheme: LinearPathScheme, sol: LpsSolution) -> Path:
    """Instantiate the scheme with ``sol.phi`` and validate it as a walk from ``x`` to ``y``."""
    path = scheme.instantiate(sol.phi)
    try:
        end = run_path(Configuration(scheme.start, tuple(sol.x)), path, Domain.NAT)
    except DomainViolation as e:
        raise InternalInconsistency(f"scheme solution is not a walk: {e}") from None
    if end != Configuration(scheme.end, tuple(sol.y)):
        raise InternalInconsistency(f"scheme walk ends at {end}, expected {scheme.end}{sol.y}")
    return path


# -- enumeration -------------------------------------------------------------------

def _is_primitive(word: tuple[int, ...]) -> bool:
    n = len(word)
    return not any(n % p == 0 and word == word[:p] * (n // p) for p in range(1, n))


def _closed_walks(graph: VassGraph, s: str, max_len: int) -> list[tuple[int, ...]]:
    out = []

    def rec(state, ids):
        if ids and state == s and _is_primitive(tuple(ids)):
            out.append(tuple(ids))
        if len(ids) == max_len:
            return
        for t in graph.out_edges[state]:
            ids.append(t.id)
            rec(t.dst, ids)
            ids.pop()

    rec(s, [])
    return out


def _schemes_exact(graph: VassGraph, p: str, q: str, length: int, max_cycles: int):
    cycles_cache: dict[tuple[str, int], list] = {}

    def cycles(s, budget):
        key = (s, budget)
        if key not in cycles_cache:
            cycles_cache[key] = _closed_walks(graph, s, budget)
        return cycles_cache[key]

    def rec(state, budget, alphas, betas, cur):
        if budget == 0:
            if state == q:
                yield LinearPathScheme(graph, p, tuple(alphas) + (tuple(cur),), tuple(betas))
            return
        for t in graph.out_edges[state]:
            cur.append(t.id)
            yield from rec(t.dst, budget - 1, alphas, betas, cur)
            cur.pop()
        if len(betas) < max_cycles:
            for beta in cycles(state, budget):
                # beta* beta* with nothing in between is the same language as beta*
                if not cur and betas and betas[-1] == beta:
                    continue
                yield from rec(state, budget - len(beta), alphas + [tuple(cur)], betas + [beta], [])

    yield from rec(p, length, [], [], [])


def enumerate_lps(graph: VassGraph, p: str, q: str, length_bound: int, max_cycles: int
                  ) -> Iterator[LinearPathScheme]:
    """Schemes from ``p`` to ``q``, shortest first, then lexicographic on transition ids.

    Cycles are primitive closed walks anchored at their junction; a cycle is never
    repeated immediately after itself.
    """
    for length in range(length_bound + 1):
        yield from sorted(_schemes_exact(graph, p, q, length, max_cycles), key=LinearPathScheme.sort_key)


@dataclass(frozen=True)
class LpsReachResult:
    path: Path | None
    scheme: LinearPathScheme | None
    solution: LpsSolution | None
    schemes_tried: int
    length_bound: int
    max_cycles: int
    skipped: int = 0

    @property
    def found(self) -> bool:
        return self.path is not None


def lps_reach(graph: VassGraph, p: str, m: Sequence[int], q: str, n: Sequence[int],
              length_bound: int, max_cycles: int, cap: int = DEFAULT_NODE_CAP) -> LpsReachResult:
    """Search schemes in enumeration order; the first solvable one yields a validated walk.

    Failure means only that no scheme within the bounds captures a walk. Schemes whose
    system exceeds ``cap`` are skipped and counted in ``skipped``.
    """
    tried = skipped = 0
    target = tuple(b - a for a, b in zip(m, n))
    for scheme in enumerate_lps(graph, p, q, length_bound, max_cycles):
        tried += 1
        if scheme.n_cycles == 0 and _delta(graph, scheme.alphas[0]) != target:
            continue
        if quick_reject(scheme, m, n):
            continue
        try:
            sol = solve_lps(scheme, m, n, cap)
        except ResourceLimit:
            skipped += 1
            continue
        if sol is not None:
            return LpsReachResult(extract_walk(scheme, sol), scheme, sol, tried, length_bound, max_cycles,
                                  skipped)
    return LpsReachResult(None, None, None, tried, length_bound, max_cycles, skipped)
