"""Effectively 2-dimensional 3-VASS: planes, projections, band encodings, scheme search.

Axes are 0-based throughout (axis 0 is the first coordinate).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .core import (GE, LE, Transition, VassGraph, cycle_space, in_zone, zone_of)
from .errors import LiftUndefined, NotEff2D, ResourceLimit
from .linalg import primitive, rref
from .lps import (LinearPathScheme, PumpConstants, enumerate_lps, extract_walk, is_zigzag_free,
                  lps_reach, solve_lps)


# -- planes and zones --------------------------------------------------------------

@dataclass(frozen=True)
class Plane2D:
    normal: tuple[int, int, int]
    basis: tuple[tuple[int, ...], tuple[int, ...]]

    @classmethod
    def from_basis(cls, u, v) -> "Plane2D":
        n = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
        if not any(n):
            raise ValueError("basis vectors are parallel")
        return cls(primitive(n), (tuple(u), tuple(v)))

    @classmethod
    def from_normal(cls, normal) -> "Plane2D":
        a, b, c = normal
        cands = [(b, -a, 0), (c, 0, -a), (0, c, -b)]
        vs = [v for v in cands if any(v)]
        u = primitive(vs[0])
        w = next(primitive(v) for v in vs[1:] if any(x for x in _cross(u, v)))
        return cls(primitive(normal), (u, w))

    def contains(self, v) -> bool:
        return sum(a * b for a, b in zip(self.normal, v)) == 0


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


DEGENERATE = "Degenerate"


def _lift_coeffs(normal, kept: tuple[int, int]):
    """Coefficients ``(a, b)`` with ``v[k] = a v[i] + b v[j]`` on the plane, or None."""
    i, j = kept
    k = 3 - i - j
    if normal[k] == 0:
        return None
    return (Fraction(-normal[i], normal[k]), Fraction(-normal[j], normal[k]))


def _sign_ok(x, s) -> bool:
    return x >= 0 if s == GE else x <= 0


def subspace_zone_axes(plane: Plane2D, zone):
    """Axes ``(i, j)`` such that plane points obeying the zone on ``i`` and ``j`` lie in the zone.

    Returns ``DEGENERATE`` when the plane meets the zone in less than a 2-dimensional cone.
    """
    if not _zone_spans(plane, zone):
        return DEGENERATE
    best = None
    for i, j in combinations(range(3), 2):
        co = _lift_coeffs(plane.normal, (i, j))
        if co is None:
            continue
        k = 3 - i - j
        si = 1 if zone[i] == GE else -1
        sj = 1 if zone[j] == GE else -1
        # cone generators: preimages of si*e_i and sj*e_j
        if not (_sign_ok(co[0] * si, zone[k]) and _sign_ok(co[1] * sj, zone[k])):
            continue
        key = (max(co[0].denominator, co[1].denominator), (i, j))
        if best is None or key < best[0]:
            best = (key, (i, j))
    return DEGENERATE if best is None else best[1]


def _zone_spans(plane: Plane2D, zone) -> bool:
    """Whether the cone ``plane ∩ zone`` is 2-dimensional (spans the plane)."""
    rays = _cone_rays(plane, zone)
    if len(rays) < 2:
        return False
    return any(any(_cross(a, b)) for a, b in combinations(rays, 2))


def _cone_rays(plane: Plane2D, zone):
    """Extreme rays of ``plane ∩ zone``: intersections of the plane with coordinate planes."""
    rays = []
    for k in range(3):
        # line plane ∩ {x_k = 0}
        e = [0, 0, 0]
        e[k] = 1
        d = _cross(plane.normal, e)
        if not any(d):
            # the plane is the coordinate plane itself: its own axes bound the cone
            for j in range(3):
                if j != k:
                    for s in (1, -1):
                        v = [0, 0, 0]
                        v[j] = s
                        if in_zone(v, zone):
                            rays.append(tuple(v))
            continue
        for s in (1, -1):
            v = tuple(s * x for x in d)
            if in_zone(v, zone):
                rays.append(v)
    return rays


# -- projection ---------------------------------------------------------------------

@dataclass(frozen=True)
class Projection:
    kept: tuple[int, int]
    dropped: int
    coeffs: tuple[Fraction, Fraction]

    def project(self, v) -> tuple[int, int]:
        return (v[self.kept[0]], v[self.kept[1]])

    def lift(self, w) -> tuple:
        """Exact preimage of a projected displacement lying in the cycle space."""
        val = self.coeffs[0] * w[0] + self.coeffs[1] * w[1]
        out = [None] * 3
        out[self.kept[0]], out[self.kept[1]] = w[0], w[1]
        out[self.dropped] = int(val) if val.denominator == 1 else val
        return tuple(out)


def projection_for(graph: VassGraph, axes: tuple[int, int]) -> Projection:
    i, j = sorted(axes)
    k = 3 - i - j
    basis = cycle_space(graph).basis
    if not basis:
        return Projection((i, j), k, (Fraction(0), Fraction(0)))
    # solve a*b[i] + c*b[j] = b[k] for every basis vector
    rows = [[b[i], b[j], b[k]] for b in basis]
    red, piv = rref(rows)
    if 2 in piv:
        raise LiftUndefined(f"coordinate {k} is not a function of coordinates {i},{j} on the cycle space")
    sol = [Fraction(0), Fraction(0)]
    for r, pc in enumerate(piv):
        sol[pc] = red[r][2]
    return Projection((i, j), k, (sol[0], sol[1]))


def project(graph: VassGraph, axes: tuple[int, int]):
    """The 2-VASS keeping ``axes``, with the exact lift for cycle displacements."""
    proj = projection_for(graph, axes)
    ts = tuple(Transition(t.id, t.src, t.dst, proj.project(t.delta), t.name, t.origin)
               for t in graph.transitions)
    return VassGraph(2, graph.states, ts, graph.q_in, graph.q_out), proj


def lift_scheme(scheme2: LinearPathScheme, graph: VassGraph) -> LinearPathScheme:
    """The same scheme over the 3-dimensional graph (transition ids coincide)."""
    return LinearPathScheme(graph, scheme2.start, scheme2.alphas, scheme2.betas)


# -- bands ------------------------------------------------------------------------------

def band_state(q: str, g: int) -> str:
    return f"{q}@{g}"


def band_encode(graph: VassGraph, axis: int, bound: int) -> VassGraph:
    """Track coordinate ``axis`` in the control state, restricted to ``[0, bound]``."""
    states = tuple(band_state(q, g) for q in graph.states for g in range(bound + 1))
    ts = []
    for t in graph.transitions:
        a = t.delta[axis]
        rest = tuple(x for k, x in enumerate(t.delta) if k != axis)
        for g in range(bound + 1):
            h = g + a
            if 0 <= h <= bound:
                ts.append(Transition(len(ts), band_state(t.src, g), band_state(t.dst, h), rest,
                                     t.name, t.origin))
    return VassGraph(graph.dim - 1, states, tuple(ts), band_state(graph.q_in, 0), band_state(graph.q_out, 0))


def drop_axis(v, axis):
    return tuple(x for k, x in enumerate(v) if k != axis)


# -- regions ------------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionSpec:
    kind: str  # HighOctant, Band, BandUnion, Corridor, CrossCorridor, Overlap
    axis: int | None = None
    D: int = 0
    D_prime: int = 0
    T_cal: int = 0

    def contains(self, m) -> bool:
        lo = 2 * self.D
        if self.kind == "HighOctant":
            return all(x >= lo for x in m)
        if self.kind == "Band":
            return m[self.axis] <= lo
        if self.kind == "BandUnion":
            return any(x <= lo + 2 * self.T_cal for x in m)
        if self.kind == "Overlap":
            return all(x >= lo for x in m) and any(x <= lo + 2 * self.T_cal for x in m)
        if self.kind == "Corridor":
            return sum(x <= self.D_prime for x in m) >= 2
        raise ValueError(self.kind)


@dataclass(frozen=True)
class RegionPlan:
    segments: tuple[RegionSpec, ...]
    D: int
    D_prime: int
    T_cal: int
    crossing_bound: int

    def __len__(self):
        return len(self.segments)


def region_constants(graph: VassGraph, c: int):
    pc = PumpConstants.of(graph, c)
    D = pc.D
    D_prime = len(graph.states) * (2 * D + 1) * graph.norm_T
    T_cal = graph.max_norm * len(graph.states)
    return D, D_prime, T_cal


def region_decompose(graph: VassGraph, p: str, m, q: str, n, c: int = 0) -> RegionPlan:
    """Region schedule for a query: which regions the endpoints occupy and how they connect."""
    D, Dp, Tc = region_constants(graph, c)
    bound = 2 * len(graph.states) * (2 * D + 1) ** 2 + 1
    mk = lambda kind, axis=None: RegionSpec(kind, axis, D, Dp, Tc)
    if p == q and tuple(m) == tuple(n):
        return RegionPlan((), D, Dp, Tc, bound)
    high = mk("HighOctant")

    def region_of(v):
        if high.contains(v):
            return high
        axis = min(range(len(v)), key=lambda k: (v[k], k))
        return mk("Band", axis)

    a, b = region_of(m), region_of(n)
    if a == b:
        segs = (a,)
    elif a.kind == "HighOctant" or b.kind == "HighOctant":
        segs = (a, mk("Overlap"), b)
    else:
        segs = (a, mk("Overlap"), high, mk("Overlap"), b)
    assert len(segs) <= bound, "region plan exceeds the crossing bound"
    return RegionPlan(segs, D, Dp, Tc, bound)


# -- search -----------------------------------------------------------------------------------

@dataclass(frozen=True)
class Eff2dResult:
    path: object  # Path | None
    scheme: LinearPathScheme | None
    route: str
    length_bound: int
    max_cycles: int
    plan: RegionPlan | None = None

    @property
    def found(self) -> bool:
        return self.path is not None


def _projected_search(graph, p, m, q, n, length_bound, max_cycles, cap):
    """Zigzag-free schemes found in a 2-dimensional projection, lifted and re-solved in 3D."""
    basis = cycle_space(graph).basis
    if len(basis) != 2:
        return None
    plane = Plane2D.from_basis(*basis)
    diff = tuple(b - a for a, b in zip(m, n))
    for zone in sorted(zone_of(diff)):
        axes = subspace_zone_axes(plane, zone)
        if axes == DEGENERATE:
            continue
        g2, proj = project(graph, axes)
        z2 = (zone[axes[0]], zone[axes[1]])
        for s2 in enumerate_lps(g2, p, q, length_bound, max_cycles):
            if not is_zigzag_free(s2, z2):
                continue
            s3 = lift_scheme(s2, graph)
            try:
                sol = solve_lps(s3, m, n, cap)
            except ResourceLimit:
                continue
            if sol is not None:
                return s3, extract_walk(s3, sol)
    return None


def eff2d_reach(graph: VassGraph, p: str, m, q: str, n, length_bound: int = 6, max_cycles: int = 2,
                c: int = 0, cap: int = 200_000) -> Eff2dResult:
    """Search a walk ``p(m) -> q(n)`` by linear path schemes in an effectively <= 2-dim VASS.

    A negative answer is relative to ``length_bound`` and ``max_cycles``.
    """
    nG = cycle_space(graph).dim
    if graph.dim == 3 and nG == 3:
        raise NotEff2D("the cycle space is 3-dimensional")
    m, n = tuple(m), tuple(n)
    if p == q and m == n:
        empty = LinearPathScheme(graph, p, ((),))
        return Eff2dResult(empty.instantiate(()), empty, "trivial", 0, 0)
    plan = region_decompose(graph, p, m, q, n, c)
    if graph.dim == 3 and nG == 2 and all(s.kind == "HighOctant" for s in plan.segments):
        hit = _projected_search(graph, p, m, q, n, length_bound, max_cycles, cap)
        if hit is not None:
            return Eff2dResult(hit[1], hit[0], "projected", length_bound, max_cycles, plan)
    res = lps_reach(graph, p, m, q, n, length_bound, max_cycles, cap)
    return Eff2dResult(res.path, res.scheme, "direct", length_bound, max_cycles, plan)
