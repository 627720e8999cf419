"""Exact rational linear algebra on small integer matrices."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence


def rref(rows: Sequence[Sequence[int | Fraction]]):
    """Reduced row echelon form over Q.

    Returns ``(matrix, pivots)`` where ``matrix`` holds only the nonzero rows.
    """
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        m[r] = [x / lead for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def primitive(vec: Sequence[int | Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to the integer vector with gcd 1 (sign kept)."""
    fr = [Fraction(x) for x in vec]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def span_basis(vectors) -> list[tuple[int, ...]]:
    """An integer basis (primitive rows of the RREF) of the span of ``vectors``."""
    vecs = [list(v) for v in vectors if any(v)]
    if not vecs:
        return []
    red, _ = rref(vecs)
    return [primitive(row) for row in red]


def in_span(basis, v) -> bool:
    if not any(v):
        return True
    if not basis:
        return False
    return rank(list(basis) + [list(v)]) == rank(basis)


def nullspace(rows, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel ``{x : A x = 0}`` over Q."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][f]
        basis.append(v)
    return basis


def solve_unique(rows, rhs):
    """Solve ``A x = b`` over Q when the solution is unique.

    Returns the solution, ``None`` if inconsistent, or raises ``ValueError``
    when the kernel is nontrivial.
    """
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    if len(pivots) < ncols:
        raise ValueError("solution not unique")
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x
