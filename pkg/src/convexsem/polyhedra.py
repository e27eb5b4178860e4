"""Exact H-representations and vertex enumeration for small polytopes.

Everything is brute force over subsets, so it is only meant for low
dimensions and a few dozen vertices; callers get ``None`` when the search
would be too large.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

SEARCH_LIMIT = 50_000

Halfspace = tuple  # (normal tuple, rhs): normal . x <= rhs


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = _rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(a: list[list[Fraction]], b: list[Fraction]) -> tuple | None:
    """Unique solution of a square system, else None."""
    n = len(a)
    red, pivots = _rref([list(r) + [y] for r, y in zip(a, b)])
    if pivots != list(range(n)):
        return None
    return tuple(row[n] for row in red)


def _normalize(normal, rhs) -> Halfspace:
    # scale so the first nonzero coefficient is +-1
    lead = next(abs(x) for x in normal if x != 0)
    return tuple(x / lead for x in normal), rhs / lead


def hrep(vertices: Sequence[tuple]) -> tuple[list[Halfspace], list[Halfspace]] | None:
    """Inequalities and equalities cutting out the hull of ``vertices``."""
    vs = list(dict.fromkeys(tuple(Fraction(x) for x in v) for v in vertices))
    d = len(vs[0])
    v0 = vs[0]
    diffs = [[a - b for a, b in zip(v, v0)] for v in vs[1:]]
    red, pivots = _rref(diffs) if diffs else ([], [])
    k = len(pivots)
    eqs = []
    for n in nullspace(red, d):
        eqs.append(_normalize(tuple(n), sum(a * b for a, b in zip(n, v0))))
    if k == 0:
        return [], eqs
    # the affine hull projects injectively onto the pivot coordinates
    proj = [tuple(v[c] for c in pivots) for v in vs]
    ineqs = []
    if k == 1:
        lo, hi = min(p[0] for p in proj), max(p[0] for p in proj)
        ineqs = [((-1,), -lo), ((1,), hi)]
    else:
        if comb(len(proj), k) > SEARCH_LIMIT:
            return None
        seen = set()
        for subset in combinations(proj, k):
            base = subset[0]
            rows = [[a - b for a, b in zip(p, base)] for p in subset[1:]]
            ns = nullspace(rows, k)
            if len(ns) != 1:
                continue
            normal = ns[0]
            rhs = sum(a * b for a, b in zip(normal, base))
            sides = set()
            for p in proj:
                dot = sum(a * b for a, b in zip(normal, p))
                if dot != rhs:
                    sides.add(1 if dot > rhs else -1)
            if len(sides) != 1:
                continue
            if sides == {1}:
                normal, rhs = [-x for x in normal], -rhs
            h = _normalize(tuple(normal), rhs)
            if h not in seen:
                seen.add(h)
                ineqs.append(h)
    lifted = []
    for normal, rhs in ineqs:
        full = [Fraction(0)] * d
        for c, a in zip(pivots, normal):
            full[c] = Fraction(a)
        lifted.append((tuple(full), Fraction(rhs)))
    return lifted, eqs


def box_hrep(intervals) -> tuple[list[Halfspace], list[Halfspace]]:
    d = len(intervals)
    ineqs, eqs = [], []
    for i, iv in enumerate(intervals):
        e = tuple(Fraction(int(j == i)) for j in range(d))
        if iv.lo == iv.hi:
            eqs.append((e, iv.lo))
        else:
            ineqs.append((e, iv.hi))
            ineqs.append((tuple(-x for x in e), -iv.lo))
    return ineqs, eqs


def vertices(d: int, ineqs: list[Halfspace], eqs: list[Halfspace]) -> list[tuple] | None:
    """Vertices of ``{x : ineqs, eqs}`` (assumed bounded), by active sets."""
    eq_rows, _ = _rref([list(n) + [r] for n, r in eqs]) if eqs else ([], [])
    eqs = [(tuple(row[:d]), row[d]) for row in eq_rows if any(row[:d])]
    if any(not any(row[:d]) and row[d] != 0 for row in eq_rows):
        return []
    need = d - len(eqs)
    if need < 0:
        return []
    if comb(len(ineqs), need) > SEARCH_LIMIT:
        return None
    found = []
    for active in combinations(ineqs, need):
        rows = [list(n) for n, _ in eqs] + [list(n) for n, _ in active]
        rhs = [r for _, r in eqs] + [r for _, r in active]
        x = solve(rows, rhs)
        if x is None:
            continue
        if all(sum(a * b for a, b in zip(n, x)) <= r for n, r in ineqs) and \
                all(sum(a * b for a, b in zip(n, x)) == r for n, r in eqs):
            found.append(x)
    return list(dict.fromkeys(found))
