"""Coverability tools: Karp-Miller acceleration, backward coverability, pumping paths."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .core import OMEGA, VassGraph, rigid_dims
from .errors import ResourceLimit

DEFAULT_KM_CAP = 50_000


def _ext_leq(a, b) -> bool:
    return all(y is OMEGA or (x is not OMEGA and x <= y) for x, y in zip(a, b))


def karp_miller(graph: VassGraph, p: str, u: Sequence, cap: int = DEFAULT_KM_CAP):
    """Labels of a Karp-Miller tree from ``p(u)`` (entries of ``u`` may be OMEGA).

    Returns a list of ``(state, label)`` pairs whose downward closure equals the
    downward closure of the reachable set. A node is not expanded when an earlier
    node at the same state already covers it.
    """
    root = (p, tuple(u))
    nodes = [root]
    parent = {0: None}
    todo = deque([0])
    while todo:
        idx = todo.popleft()
        s, lab = nodes[idx]
        for t in graph.out_edges[s]:
            new = []
            ok = True
            for x, a in zip(lab, t.delta):
                if x is OMEGA:
                    new.append(OMEGA)
                else:
                    x += a
                    if x < 0:
                        ok = False
                        break
                    new.append(x)
            if not ok:
                continue
            # accelerate against strictly smaller ancestors at the same state
            anc = idx
            while anc is not None:
                s2, lab2 = nodes[anc]
                if s2 == t.dst and _ext_leq(lab2, new) and tuple(lab2) != tuple(new):
                    new = [OMEGA if (y is not OMEGA and x is not OMEGA and y < x) or x is OMEGA else x
                           for y, x in zip(lab2, new)]
                anc = parent[anc]
            new = tuple(new)
            if any(s2 == t.dst and _ext_leq(new, lab2) for s2, lab2 in nodes):
                continue
            nodes.append((t.dst, new))
            parent[len(nodes) - 1] = idx
            todo.append(len(nodes) - 1)
            if len(nodes) > cap:
                raise ResourceLimit(f"Karp-Miller tree exceeded {cap} nodes")
    return nodes


def km_bounds(graph: VassGraph, p: str, u: Sequence, cap: int = DEFAULT_KM_CAP) -> tuple:
    """Per-coordinate supremum over all configurations reachable from ``p(u)`` (OMEGA if unbounded)."""
    out = [0] * graph.dim
    for _, lab in karp_miller(graph, p, u, cap):
        for k, x in enumerate(lab):
            if out[k] is OMEGA:
                continue
            out[k] = OMEGA if x is OMEGA else max(out[k], x)
    return tuple(out)


@dataclass
class _Elem:
    state: str
    vec: tuple[int, ...]
    tid: int | None = None  # transition leading towards the target
    succ: "_Elem | None" = None


def backward_basis(graph: VassGraph, target_state: str, target: Sequence[int],
                   cap: int = DEFAULT_KM_CAP) -> dict[str, list[_Elem]]:
    """Minimal elements of the configurations that can cover ``target_state(target)``.

    Vectors range over the tracked coordinates only; callers drop OMEGA coordinates.
    """
    basis: dict[str, list[_Elem]] = {s: [] for s in graph.states}
    root = _Elem(target_state, tuple(target))
    basis[target_state].append(root)
    todo = deque([root])
    count = 1
    while todo:
        e = todo.popleft()
        if e not in basis[e.state]:
            continue  # superseded by a smaller element
        for t in graph.in_edges[e.state]:
            vec = tuple(max(x - a, 0) for x, a in zip(e.vec, t.delta))
            lst = basis[t.src]
            if any(all(b <= v for b, v in zip(o.vec, vec)) for o in lst):
                continue
            lst[:] = [o for o in lst if not all(v <= b for v, b in zip(vec, o.vec))]
            new = _Elem(t.src, vec, t.id, e)
            lst.append(new)
            todo.append(new)
            count += 1
            if count > cap:
                raise ResourceLimit(f"backward coverability exceeded {cap} elements")
    return basis


def cover_path(graph: VassGraph, p: str, u: Sequence[int], q: str, target: Sequence[int],
               cap: int = DEFAULT_KM_CAP) -> list[int] | None:
    """A path from ``p(u)`` that is a walk and ends at ``q(n)`` with ``n >= target``."""
    basis = backward_basis(graph, q, target, cap)
    start = next((e for e in basis[p] if all(b <= x for b, x in zip(e.vec, u))), None)
    if start is None:
        return None
    ids = []
    e = start
    while e.succ is not None:
        ids.append(e.tid)
        e = e.succ
    return ids


# -- pumping --------------------------------------------------------------------------

@dataclass(frozen=True)
class Pumpable:
    forward: tuple[int, ...]
    backward: tuple[int, ...]


@dataclass(frozen=True)
class NotForward:
    dims: frozenset


@dataclass(frozen=True)
class NotBackward:
    dims: frozenset


def _pump(graph: VassGraph, p: str, u: Sequence, ignore: set[int], cap: int):
    """Cycle at ``p`` from ``p(u)`` strictly increasing every tracked finite coordinate.

    Returns ``(path, failing_dims)``; ``path`` is None when no such cycle exists.
    """
    tracked = [k for k in range(graph.dim) if u[k] is not OMEGA]
    want = [k for k in tracked if k not in ignore]
    if not want:
        return (), frozenset()
    sub = _restrict(graph, tracked)
    base = [u[k] for k in tracked]
    target = [u[k] + 1 if k in want else 0 for k in tracked]
    path = cover_path(sub, p, base, p, target, cap)
    if path is not None:
        return tuple(path), frozenset()
    failing = set()
    for k in want:
        tgt = [u[j] + 1 if j == k else 0 for j in tracked]
        if cover_path(sub, p, base, p, tgt, cap) is None:
            failing.add(k)
    if not failing:
        # every coordinate grows on its own but never all at once
        failing = set(want)
    return None, frozenset(failing)


def _restrict(graph: VassGraph, dims) -> VassGraph:
    from .core import Transition
    ts = tuple(Transition(t.id, t.src, t.dst, tuple(t.delta[k] for k in dims), t.name, t.origin)
               for t in graph.transitions)
    return VassGraph(len(dims), graph.states, ts, graph.q_in, graph.q_out)


def pumpable(graph: VassGraph, u: Sequence, v: Sequence, ignore_rigid: bool = False,
             cap: int = DEFAULT_KM_CAP):
    """Pumpability of ``u G v`` (0-based coordinates in the returned dimension sets).

    With ``ignore_rigid`` the coordinates on which every cycle has zero displacement
    are not required to grow.
    """
    ignore = set(rigid_dims(graph)) if ignore_rigid else set()
    fwd, bad = _pump(graph, graph.q_in, u, ignore, cap)
    if fwd is None:
        return NotForward(bad)
    rev = graph.reversed()
    bwd, bad = _pump(rev, graph.q_out, v, ignore, cap)
    if bwd is None:
        return NotBackward(bad)
    return Pumpable(fwd, tuple(reversed(bwd)))
