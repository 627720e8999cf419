"""Nonnegative integer solutions of linear Diophantine systems.

Hilbert bases are computed with the Contejean-Devie completion procedure: start
from the unit vectors and repeatedly add a unit vector ``e_j`` to a candidate
``p`` whenever ``<Ap, Ae_j> < 0``, discarding candidates that dominate an
already found solution. Affine systems ``Ax = r`` are handled through the
extended homogeneous system ``Ax - x'r = 0`` restricted to ``x' <= 1``.

Before completion, systems go through an order-preserving presolve that
eliminates fixed variables, merges variables differing by a constant, and
drops redundant defining rows. The solution sets before and after presolve are
in monotone bijection, so minimal solutions map to minimal solutions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .errors import ResourceLimit
from .linalg import rank as mat_rank
from .linalg import solve_unique

DEFAULT_NODE_CAP = 200_000


@dataclass(frozen=True)
class DiophantineSystem:
    """``A x = r`` over N^k, with some variables pinned to fixed values."""

    A: tuple[tuple[int, ...], ...]
    r: tuple[int, ...]
    nvars: int
    fixed: tuple[tuple[int, int], ...] = ()
    names: tuple[str, ...] = ()

    @classmethod
    def make(cls, A, r=None, fixed: Mapping[int, int] | None = None, names=(), nvars=None):
        A = tuple(tuple(int(x) for x in row) for row in A)
        k = nvars if nvars is not None else (len(A[0]) if A else 0)
        if any(len(row) != k for row in A):
            raise ValueError("ragged matrix")
        r = tuple(int(x) for x in (r if r is not None else [0] * len(A)))
        if len(r) != len(A):
            raise ValueError("right-hand side length differs from row count")
        fx = tuple(sorted((int(i), int(v)) for i, v in (fixed or {}).items()))
        for i, v in fx:
            if not 0 <= i < k:
                raise ValueError(f"fixed variable {i} out of range")
            if v < 0:
                raise ValueError("fixed values must be nonnegative")
        return cls(A, r, k, fx, tuple(names))

    @property
    def is_homogeneous(self) -> bool:
        return not any(self.r)

    def homogeneous(self) -> "DiophantineSystem":
        """Same matrix, zero right-hand side, fixed variables pinned to zero."""
        return DiophantineSystem(self.A, (0,) * len(self.r), self.nvars,
                                 tuple((i, 0) for i, _ in self.fixed), self.names)

    def satisfied_by(self, x: Sequence[int]) -> bool:
        if len(x) != self.nvars or any(v < 0 for v in x):
            return False
        if any(x[i] != v for i, v in self.fixed):
            return False
        return all(sum(a * b for a, b in zip(row, x)) == rhs for row, rhs in zip(self.A, self.r))


def norm1_matrix(A) -> int:
    return sum(abs(x) for row in A for x in row)


def basis_norm_bound(A, k: int | None = None) -> int:
    """Norm bound ``(1 + k ||A||_1)^rank(A)`` on Hilbert basis elements."""
    k = k if k is not None else (len(A[0]) if A else 0)
    rk = mat_rank(A) if A else 0
    return (1 + k * norm1_matrix(A)) ** rk


def minimal_solution_bound(A, r) -> int:
    """Norm bound ``(1 + k ||A||_1 + ||r||_1)^(rank+1)`` on minimal affine solutions."""
    k = len(A[0]) if A else 0
    rk = mat_rank([list(row) + [-x] for row, x in zip(A, r)]) if A else 0
    return (1 + k * norm1_matrix(A) + sum(abs(x) for x in r)) ** (rk + 1)


# -- completion ---------------------------------------------------------------

def _leq(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _completion(cols: list[tuple[int, ...]], m: int, upper: dict[int, int], cap: int,
                stop_on: int | None = None):
    """Minimal nonzero solutions of ``sum_j x_j cols[j] = 0`` with ``x_j <= upper[j]``.

    Only minimal solutions whose entries respect the upper bounds are produced;
    this is exact because completion paths stay below their target solution.
    """
    k = len(cols)
    zero = (0,) * m
    found: list[tuple[int, ...]] = []
    frontier: dict[tuple[int, ...], tuple[int, ...]] = {}
    for j in range(k):
        if upper.get(j, 1) < 1:
            continue
        v = tuple(int(i == j) for i in range(k))
        frontier[v] = cols[j]
    nodes = 0
    while frontier:
        nodes += len(frontier)
        if nodes > cap:
            raise ResourceLimit(f"Hilbert basis completion exceeded {cap} candidates")
        fresh = [v for v, ax in frontier.items() if ax == zero]
        fresh.sort()
        for v in fresh:
            if not any(_leq(b, v) for b in found):
                found.append(v)
                if stop_on is not None and v[stop_on]:
                    return [v]
        nxt: dict[tuple[int, ...], tuple[int, ...]] = {}
        for v, ax in frontier.items():
            if ax == zero:
                continue
            for j in range(k):
                cj = cols[j]
                if sum(a * b for a, b in zip(ax, cj)) >= 0:
                    continue
                if v[j] + 1 > upper.get(j, v[j] + 1):
                    continue
                w = v[:j] + (v[j] + 1,) + v[j + 1:]
                if w in nxt:
                    continue
                if any(_leq(b, w) for b in found):
                    continue
                nxt[w] = tuple(a + b for a, b in zip(ax, cj))
        frontier = nxt
    return sorted(found)


# -- presolve -----------------------------------------------------------------

class _Infeasible(Exception):
    pass


@dataclass
class _Reduced:
    """Reduced system plus the affine map back to original variables."""

    rows: list[dict[int, int]]
    rhs: list[int]
    expr: list[tuple[int | None, int]]  # original var i = y[rep] + const, or const when rep is None
    nvars: int


def _presolve(A, r, fixed: Mapping[int, int], nvars: int) -> _Reduced:
    rows = [{j: a for j, a in enumerate(row) if a} for row in A]
    rhs = list(r)
    link: dict[int, tuple[int | None, int]] = {}  # eliminated var -> (target or None, offset)
    occ: dict[int, set[int]] = {j: set() for j in range(nvars)}
    for ri, row in enumerate(rows):
        for j in row:
            occ[j].add(ri)
    alive = [True] * len(rows)

    def repoint(v, target, offset):
        link[v] = (target, offset)

    def fix(v, val):
        if val < 0:
            raise _Infeasible
        for ri in occ[v]:
            rhs[ri] -= rows[ri].pop(v) * val
        occ[v] = set()
        repoint(v, None, val)

    def merge(v, w, c):
        """Substitute ``v = w + c`` with ``c >= 0``."""
        for ri in occ[v]:
            a = rows[ri].pop(v)
            rhs[ri] -= a * c
            nw = rows[ri].get(w, 0) + a
            if nw:
                rows[ri][w] = nw
                occ[w].add(ri)
            else:
                rows[ri].pop(w, None)
                occ[w].discard(ri)
        occ[v] = set()
        repoint(v, w, c)

    def drop(ri):
        alive[ri] = False
        for j in rows[ri]:
            occ[j].discard(ri)

    for v, val in fixed.items():
        fix(v, val)

    changed = True
    while changed:
        changed = False
        for ri in range(len(rows)):
            if not alive[ri]:
                continue
            row, b = rows[ri], rhs[ri]
            if not row:
                if b != 0:
                    raise _Infeasible
                drop(ri)
                changed = True
                continue
            if len(row) == 1:
                (v, a), = row.items()
                if b % a:
                    raise _Infeasible
                drop(ri)
                fix(v, b // a)
                changed = True
                continue
            signs = {a > 0 for a in row.values()}
            if len(signs) == 1:
                s = 1 if True in signs else -1
                if s * b < 0:
                    raise _Infeasible
                if b == 0:
                    vs = list(row)
                    drop(ri)
                    for v in vs:
                        fix(v, 0)
                    changed = True
                    continue
            if len(row) == 2:
                (v, a), (w, a2) = sorted(row.items())
                if a == -a2:
                    if b % a:
                        raise _Infeasible
                    d = b // a  # v - w = d
                    drop(ri)
                    if d >= 0:
                        merge(v, w, d)
                    else:
                        merge(w, v, -d)
                    changed = True
                    continue
        if changed:
            continue
        # rows defining a private variable z = L + c: among rows sharing L keep the one with least c
        groups: dict[frozenset, list[tuple[int, int, int]]] = {}
        for ri in range(len(rows)):
            if not alive[ri]:
                continue
            row = rows[ri]
            z = next((j for j in sorted(row) if abs(row[j]) == 1 and len(occ[j]) == 1), None)
            if z is None:
                continue
            s = row[z]  # s*z + rest = b  =>  z = s*b - s*rest
            key = frozenset((j, -s * a) for j, a in row.items() if j != z)
            groups.setdefault(key, []).append((s * rhs[ri], ri, z))
        for members in groups.values():
            if len(members) < 2:
                continue
            members.sort()
            c0, _, z0 = members[0]
            for c, ri, z in members[1:]:
                drop(ri)
                merge(z, z0, c - c0)
                changed = True

    live_rows = [ri for ri in range(len(rows)) if alive[ri]]
    def resolve(v):
        off = 0
        while v in link:
            v, c = link[v]
            off += c
            if v is None:
                break
        return v, off

    expr = [resolve(i) for i in range(nvars)]
    reps = sorted({rep for rep, _ in expr if rep is not None})
    index = {v: i for i, v in enumerate(reps)}
    new_rows = [{index[j]: a for j, a in rows[ri].items()} for ri in live_rows]
    new_expr = [(None if rep is None else index[rep], c) for rep, c in expr]
    return _Reduced(new_rows, [rhs[ri] for ri in live_rows], new_expr, len(reps))


def _components(red: _Reduced):
    """Split reduced variables into independent blocks (connected via shared rows)."""
    parent = list(range(red.nvars))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for row in red.rows:
        vs = list(row)
        for v in vs[1:]:
            a, b = find(vs[0]), find(v)
            if a != b:
                parent[a] = b
    blocks: dict[int, list[int]] = {}
    for v in range(red.nvars):
        blocks.setdefault(find(v), []).append(v)
    out = []
    for vs in blocks.values():
        vset = set(vs)
        ris = [i for i, row in enumerate(red.rows) if set(row) & vset]
        out.append((vs, ris))
    return out


def _solve_block(red: _Reduced, vs: list[int], ris: list[int], affine: bool, cap: int):
    """Minimal solutions (S_r, S_0) of one block, as dicts var -> value."""
    local = {v: i for i, v in enumerate(vs)}
    k = len(vs)
    A = [[0] * k for _ in ris]
    for r_i, ri in enumerate(ris):
        for v, a in red.rows[ri].items():
            A[r_i][local[v]] = a
    b = [red.rhs[ri] if affine else 0 for ri in ris]
    if not ris:
        # unconstrained variables: unbounded, minimal value 0
        return [{}], [{v: 1} for v in vs]
    if mat_rank(A) == k:
        sol = solve_unique(A, b)
        if sol is None or any(x.denominator != 1 or x < 0 for x in sol):
            return [], []
        return [{v: int(sol[local[v]]) for v in vs if sol[local[v]]}], []
    m = len(ris)
    cols = [tuple(A[i][j] for i in range(m)) for j in range(k)]
    upper = {}
    if any(b):
        cols.append(tuple(-x for x in b))
        upper[k] = 1
    basis = _completion(cols, m, upper, cap)
    s_r, s_0 = [], []
    for vec in basis:
        d = {vs[j]: vec[j] for j in range(k) if vec[j]}
        if any(b) and vec[k] == 1:
            s_r.append(d)
        elif not any(b) or vec[k] == 0:
            s_0.append(d)
    if not any(b):
        s_r = [{}]
    return s_r, s_0


def _lift(red: _Reduced, y: Mapping[int, int], homogeneous: bool) -> tuple[int, ...]:
    out = []
    for rep, c in red.expr:
        base = 0 if homogeneous else c
        out.append(base + (y.get(rep, 0) if rep is not None else 0))
    return tuple(out)


# -- public API ---------------------------------------------------------------

@dataclass(frozen=True)
class HilbertBasis:
    vectors: tuple[tuple[int, ...], ...]

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self):
        return len(self.vectors)

    def total(self, k: int) -> tuple[int, ...]:
        """``h0``: the sum of all basis elements."""
        s = [0] * k
        for v in self.vectors:
            for i, x in enumerate(v):
                s[i] += x
        return tuple(s)


def _as_system(sys_or_A, r=None) -> DiophantineSystem:
    if isinstance(sys_or_A, DiophantineSystem):
        return sys_or_A
    return DiophantineSystem.make(sys_or_A, r)


def _minimal(sys: DiophantineSystem, cap: int):
    """(S_r, S_0) for a system with fixed variables, in original coordinates."""
    fixed = dict(sys.fixed)
    try:
        red = _presolve(sys.A, sys.r, fixed, sys.nvars)
    except _Infeasible:
        red = None
    try:
        red0 = _presolve(sys.A, [0] * len(sys.r), {i: 0 for i in fixed}, sys.nvars)
    except _Infeasible:  # pragma: no cover - homogeneous systems are always feasible
        raise AssertionError("homogeneous presolve infeasible")

    s0 = []
    for vs, ris in _components(red0):
        _, b0 = _solve_block(red0, vs, ris, False, cap)
        s0.extend(_lift(red0, y, True) for y in b0)
    s0 = sorted(set(s0))
    if red is None:
        return [], s0
    parts = []
    for vs, ris in _components(red):
        sr, _ = _solve_block(red, vs, ris, True, cap)
        if not sr:
            return [], s0
        parts.append(sr)
    if len(parts) > 1:
        total = 1
        for p in parts:
            total *= len(p)
        if total > cap:
            raise ResourceLimit(f"{total} minimal solutions exceed cap {cap}")
    s_r = []
    for combo in product(*parts):
        y = {}
        for d in combo:
            y.update(d)
        s_r.append(_lift(red, y, False))
    return sorted(set(s_r)), s0


def hilbert_basis(sys_or_A, cap: int = DEFAULT_NODE_CAP) -> HilbertBasis:
    """Minimal nonzero solutions of a homogeneous system over N."""
    sys = _as_system(sys_or_A)
    if not sys.is_homogeneous:
        raise ValueError("hilbert_basis needs a homogeneous system")
    _, s0 = _minimal(sys.homogeneous() if sys.fixed else sys, cap)
    bound = basis_norm_bound(sys.A, sys.nvars) if sys.A else 1
    for v in s0:
        assert sum(v) <= bound, f"Hilbert element {v} exceeds the norm bound {bound}"
    return HilbertBasis(tuple(s0))


def minimal_solutions(A, r, cap: int = DEFAULT_NODE_CAP, fixed: Mapping[int, int] | None = None):
    """``(S_r, S_0)``: minimal solutions of ``Ax = r`` and the Hilbert basis of ``Ax = 0``."""
    sys = DiophantineSystem.make(A, r, fixed, nvars=None if A else 0) if not isinstance(A, DiophantineSystem) else A
    s_r, s_0 = _minimal(sys, cap)
    return tuple(s_r), tuple(s_0)


class _UnsatType:
    def __repr__(self):
        return "Unsat"

    def __bool__(self):
        return False


UNSAT = _UnsatType()


@dataclass(frozen=True)
class AffineResult:
    """A satisfiable system: one minimal solution, the full generator sets, boundedness."""

    solution: tuple[int, ...]
    minimal: tuple[tuple[int, ...], ...]  # S_r
    homogeneous: tuple[tuple[int, ...], ...]  # S_0 = H(E0)
    h0: tuple[int, ...]
    bounded: tuple[bool, ...] = field(default=())

    def values(self, var: int) -> tuple[int, ...]:
        """All values a bounded variable takes across the solution set."""
        if not self.bounded[var]:
            raise ValueError(f"variable {var} is unbounded")
        return tuple(sorted({s[var] for s in self.minimal}))


def solve_affine(sys: DiophantineSystem, cap: int = DEFAULT_NODE_CAP):
    """Solve ``sys``; returns :class:`AffineResult` or ``UNSAT``."""
    s_r, s_0 = _minimal(sys, cap)
    if not s_r:
        return UNSAT
    h0 = [0] * sys.nvars
    for v in s_0:
        for i, x in enumerate(v):
            h0[i] += x
    bounded = tuple(x == 0 for x in h0)
    return AffineResult(s_r[0], tuple(s_r), tuple(s_0), tuple(h0), bounded)


def decomposes(x: Sequence[int], s_r, s_0) -> bool:
    """Whether ``x = s + sum k_i h_i`` for some ``s`` in ``s_r`` and ``h_i`` in ``s_0``."""
    s_0 = [h for h in s_0 if any(h)]

    def rec(rest, start):
        if not any(rest):
            return True
        for i in range(start, len(s_0)):
            h = s_0[i]
            if _leq(h, rest):
                if rec(tuple(a - b for a, b in zip(rest, h)), i):
                    return True
        return False

    for s in s_r:
        if _leq(s, x) and rec(tuple(a - b for a, b in zip(x, s)), 0):
            return True
    return False


class SystemBuilder:
    """Incremental construction of a named :class:`DiophantineSystem`."""

    def __init__(self):
        self.names: list[str] = []
        self.rows: list[tuple[dict[int, int], int]] = []
        self.fixed: dict[int, int] = {}

    def var(self, name: str) -> int:
        self.names.append(name)
        return len(self.names) - 1

    def row(self, coeffs: Mapping[int, int], rhs: int = 0) -> None:
        """Add ``sum coeffs[j] * x_j = rhs`` (duplicate indices are summed)."""
        acc: dict[int, int] = {}
        for j, a in (coeffs.items() if isinstance(coeffs, Mapping) else coeffs):
            acc[j] = acc.get(j, 0) + a
        self.rows.append(({j: a for j, a in acc.items() if a}, rhs))

    def fix(self, j: int, value: int) -> None:
        if value < 0 or (j in self.fixed and self.fixed[j] != value):
            # contradictory pins: encode as an infeasible row
            self.rows.append(({}, 1))
            return
        self.fixed[j] = value

    def build(self) -> DiophantineSystem:
        k = len(self.names)
        A = [[0] * k for _ in self.rows]
        for i, (coeffs, _) in enumerate(self.rows):
            for j, a in coeffs.items():
                A[i][j] = a
        return DiophantineSystem.make(A, [b for _, b in self.rows], self.fixed, self.names, nvars=k)


def find_solution(sys: DiophantineSystem, cap: int = DEFAULT_NODE_CAP) -> tuple[int, ...] | None:
    """Some minimal solution of ``sys``, or ``None`` when unsatisfiable.

    Cheaper than :func:`solve_affine`: completion stops at the first affine solution
    of each block and no homogeneous basis is computed.
    """
    try:
        red = _presolve(sys.A, sys.r, dict(sys.fixed), sys.nvars)
    except _Infeasible:
        return None
    y: dict[int, int] = {}
    for vs, ris in _components(red):
        b = [red.rhs[ri] for ri in ris]
        if not ris or not any(b):
            continue
        local = {v: i for i, v in enumerate(vs)}
        k = len(vs)
        A = [[0] * k for _ in ris]
        for r_i, ri in enumerate(ris):
            for v, a in red.rows[ri].items():
                A[r_i][local[v]] = a
        if mat_rank(A) == k:
            sol = solve_unique(A, b)
            if sol is None or any(x.denominator != 1 or x < 0 for x in sol):
                return None
            y.update({v: int(sol[local[v]]) for v in vs})
            continue
        cols = [tuple(A[i][j] for i in range(len(ris))) for j in range(k)]
        cols.append(tuple(-x for x in b))
        hit = _completion(cols, len(ris), {k: 1}, cap, stop_on=k)
        hit = [v for v in hit if v[k] == 1]
        if not hit:
            return None
        y.update({vs[j]: hit[0][j] for j in range(k)})
    return _lift(red, y, False)
