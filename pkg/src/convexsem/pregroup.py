"""Pregroup types and reduction by planar contraction.

A simple type is a base symbol with an adjoint degree ``z``: ``n`` has
z = 0, ``n.l`` z = -1, ``n.r`` z = +1, ``n.l.l`` z = -2.  Adjacent
``x^(z) x^(z+1)`` contract to the unit, which covers both ``p.l p`` and
``p p.r``.  A reduction is recorded as a :class:`LinkDiagram`.

Positions are 0-based throughout.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import InputTooLarge, ParseError

DEFAULT_MAX_DIAGRAMS = 16
BRUTE_FORCE_LIMIT = 10


@dataclass(frozen=True, order=True)
class SimpleType:
    base: str
    z: int = 0

    @property
    def l(self) -> "SimpleType":
        return SimpleType(self.base, self.z - 1)

    @property
    def r(self) -> "SimpleType":
        return SimpleType(self.base, self.z + 1)

    def __str__(self):
        suffix = ".l" if self.z < 0 else ".r"
        return self.base + suffix * abs(self.z)


TypeString = tuple  # of SimpleType


def fmt_type(ts: Iterable[SimpleType]) -> str:
    return " ".join(str(t) for t in ts)


_TOKEN = re.compile(r"\S+")
_SIMPLE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)((?:\.[lr])*)")


def parse_type_string(text: str, alphabet: Iterable[str] | None = None) -> tuple[SimpleType, ...]:
    """Parse whitespace-separated simples like ``"n.r s n.l"``.

    Mixed suffixes such as ``n.l.r`` cancel out, as adjoints do.
    """
    allowed = set(alphabet) if alphabet is not None else None
    out = []
    for m in _TOKEN.finditer(text):
        tok = m.group()
        sm = _SIMPLE.fullmatch(tok)
        if not sm:
            raise ParseError(f"bad simple type {tok!r}", 1, m.start() + 1)
        base, suffix = sm.group(1), sm.group(2)
        if allowed is not None and base not in allowed:
            raise ParseError(f"unknown base type {base!r}", 1, m.start() + 1)
        z = suffix.count(".r") - suffix.count(".l")
        out.append(SimpleType(base, z))
    return tuple(out)


@dataclass(frozen=True)
class LinkDiagram:
    links: tuple[tuple[int, int], ...]
    survivors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(sorted(tuple(l) for l in self.links)))
        object.__setattr__(self, "survivors", tuple(self.survivors))

    @classmethod
    def from_links(cls, n: int, links: Iterable[tuple[int, int]]) -> "LinkDiagram":
        links = tuple(links)
        used = {i for l in links for i in l}
        return cls(links, tuple(i for i in range(n) if i not in used))

    def sort_key(self):
        return self.links


def contracts(left: SimpleType, right: SimpleType) -> bool:
    return left.base == right.base and right.z == left.z + 1


def validate_diagram(ts: Sequence[SimpleType], diagram: LinkDiagram, target: Sequence[SimpleType]) -> bool:
    n = len(ts)
    seen = set()
    for i, j in diagram.links:
        if not (0 <= i < j < n) or i in seen or j in seen:
            return False
        seen.update((i, j))
        if not contracts(ts[i], ts[j]):
            return False
    if diagram.survivors != tuple(k for k in range(n) if k not in seen):
        return False
    for i, j in diagram.links:
        for k, l in diagram.links:
            if i < k < j < l:
                return False
        # a surviving wire enclosed by a cup could not reach the output
        if any(i < s < j for s in diagram.survivors):
            return False
    return tuple(ts[s] for s in diagram.survivors) == tuple(target)


def _cap() -> int:
    import os
    raw = os.environ.get("CONVEXSEM_MAX_DIAGRAMS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return DEFAULT_MAX_DIAGRAMS


def reduce(ts: Sequence[SimpleType], target: Sequence[SimpleType], cap: int | None = None) -> list[LinkDiagram]:
    """All planar reductions of ``ts`` to ``target``, lexicographic, at most ``cap``.

    ``full[i][j]`` (span ``ts[i:j]`` contracts to nothing) is filled by the
    usual cubic interval recurrence; survivors must sit between fully
    reducible gaps, so a second table matches them against ``target``.
    """
    if cap is None:
        cap = _cap()
    ts, target = tuple(ts), tuple(target)
    n, m = len(ts), len(target)

    full = [[False] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        full[i][i] = True
    for length in range(2, n + 1, 2):
        for i in range(n - length + 1):
            j = i + length
            for k in range(i + 1, j, 2):
                if contracts(ts[i], ts[k]) and full[i + 1][k] and full[k + 1][j]:
                    full[i][j] = True
                    break

    @lru_cache(maxsize=None)
    def spans(i: int, j: int) -> tuple[tuple[tuple[int, int], ...], ...]:
        # every complete matching of ts[i:j]
        if i == j:
            return ((),)
        out = []
        for k in range(i + 1, j, 2):
            if contracts(ts[i], ts[k]) and full[i + 1][k] and full[k + 1][j]:
                for inner in spans(i + 1, k):
                    for rest in spans(k + 1, j):
                        out.append(((i, k),) + inner + rest)
        return tuple(out)

    # ok[p][q]: ts[p:] can yield target[q:]
    ok = [[False] * (m + 1) for _ in range(n + 1)]
    for p in range(n, -1, -1):
        for q in range(m, -1, -1):
            if q == m:
                ok[p][q] = full[p][n]
                continue
            ok[p][q] = any(full[p][s] and ts[s] == target[q] and ok[s + 1][q + 1]
                           for s in range(p, n))

    @lru_cache(maxsize=None)
    def tails(p: int, q: int) -> tuple[tuple[tuple[int, int], ...], ...]:
        if q == m:
            return spans(p, n) if full[p][n] else ()
        out = []
        for s in range(p, n):
            if full[p][s] and ts[s] == target[q] and ok[s + 1][q + 1]:
                for gap in spans(p, s):
                    for rest in tails(s + 1, q + 1):
                        out.append(gap + rest)
        return tuple(out)

    if not ok[0][0]:
        return []
    diagrams = sorted({LinkDiagram.from_links(n, links) for links in tails(0, 0)},
                      key=LinkDiagram.sort_key)
    return diagrams[:cap]


def brute_force_reduce(ts: Sequence[SimpleType], target: Sequence[SimpleType]) -> list[LinkDiagram]:
    """Exhaustive enumeration of partial matchings, filtered by validity."""
    ts, target = tuple(ts), tuple(target)
    n = len(ts)
    if n > BRUTE_FORCE_LIMIT:
        raise InputTooLarge(f"brute force is limited to {BRUTE_FORCE_LIMIT} simples, got {n}")

    def matchings(free: tuple[int, ...]):
        if not free:
            yield ()
            return
        head, rest = free[0], free[1:]
        yield from matchings(rest)
        for idx, partner in enumerate(rest):
            for more in matchings(rest[:idx] + rest[idx + 1:]):
                yield ((head, partner),) + more

    found = set()
    for links in matchings(tuple(range(n))):
        d = LinkDiagram.from_links(n, links)
        if validate_diagram(ts, d, target):
            found.add(d)
    return sorted(found, key=LinkDiagram.sort_key)
