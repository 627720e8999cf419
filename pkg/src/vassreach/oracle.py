"""Brute-force breadth-first reachability inside a box, used as an independent check."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .core import VassGraph
from .coverability import cover_path
from .errors import ResourceLimit


@dataclass(frozen=True)
class OracleResult:
    reachable: bool
    walk: tuple[int, ...] | None
    exact: bool  # a negative answer is a proof of unreachability
    explored: int

    @property
    def verdict(self) -> str:
        if self.reachable:
            return "Reachable"
        return "Unreachable" if self.exact else "NotReachableWithinBox"


def bfs_oracle(graph: VassGraph, p: str, m: Sequence[int], q: str, n: Sequence[int], box: int,
               state_cap: int = 2_000_000) -> OracleResult:
    """Shortest walk ``p(m) -> q(n)`` among configurations with all coordinates ``<= box``.

    Coordinates whose displacements all have one sign are pruned once they pass the
    target for good. The negative answer is exact when no successor was clipped by
    the box, or when ``q(n)`` is not even coverable from ``p(m)``.
    """
    m, n = tuple(m), tuple(n)
    d = graph.dim
    up_only = [all(t.delta[k] >= 0 for t in graph.transitions) for k in range(d)]
    down_only = [all(t.delta[k] <= 0 for t in graph.transitions) for k in range(d)]

    def dead(loc):
        return any((up_only[k] and loc[k] > n[k]) or (down_only[k] and loc[k] < n[k]) for k in range(d))

    start, goal = (p, m), (q, n)
    prev = {start: None}
    todo = deque([start])
    clipped = False
    while todo:
        cur = todo.popleft()
        if cur == goal:
            ids = []
            while prev[cur] is not None:
                cur, tid = prev[cur]
                ids.append(tid)
            return OracleResult(True, tuple(reversed(ids)), True, len(prev))
        s, loc = cur
        for t in graph.out_edges[s]:
            nl = tuple(a + b for a, b in zip(loc, t.delta))
            if min(nl) < 0 or dead(nl):
                continue
            if max(nl) > box:
                clipped = True
                continue
            nxt = (t.dst, nl)
            if nxt not in prev:
                prev[nxt] = (cur, t.id)
                todo.append(nxt)
                if len(prev) > state_cap:
                    raise ResourceLimit(f"oracle exceeded {state_cap} configurations")
    exact = not clipped
    if not exact:
        try:
            exact = cover_path(graph, p, m, q, n) is None
        except ResourceLimit:
            pass
    return OracleResult(False, None, exact, len(prev))
