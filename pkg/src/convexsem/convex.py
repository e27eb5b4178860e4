"""Atomic domains, convex sets on them, and the mixing operation.

Continuous domains are axis-bounded boxes in Q^d; lattice domains are
finite join semilattices whose mixing discards the weights and takes the
join.  Convex sets are closed boxes, V-polytopes, or join-closed subsets
of a lattice.  Every number is a :class:`~fractions.Fraction`.
"""

from __future__ import annotations

import copy as _copy
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence, Union

from .errors import (DomainMismatch, EmptyIntersection, MalformedInput,
                     MalformedSum, UnsupportedIntersection)
from . import polyhedra
from .lp import LinearProgram

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = None

# --------------------------------------------------------------------------
# scalars


def scalar(value) -> Fraction:
    """Coerce ints, Fractions and decimal/ratio strings to an exact Fraction.

    Floats are rejected: ``0.1`` has no exact meaning here.
    """
    t = type(value)
    if t is Fraction:
        return value
    if t is int:
        return Fraction(value)
    if isinstance(value, float):
        raise MalformedInput(f"floating-point value {value!r} is not exact; use a string or Fraction")
    if isinstance(value, bool):
        raise MalformedInput("booleans are not scalars")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"not a rational scalar: {value!r}") from exc


def fmt_scalar(q: Fraction) -> str:
    """Render as a terminating decimal when exact, else ``num/den``."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    places = max(twos, fives)
    digits = abs(q.numerator) * 10 ** places // q.denominator
    sign = "-" if q < 0 else ""
    whole, frac = divmod(digits, 10 ** places)
    return f"{sign}{whole}.{str(frac).rjust(places, '0').rstrip('0')}"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", scalar(self.lo))
        object.__setattr__(self, "hi", scalar(self.hi))
        if self.lo > self.hi:
            raise MalformedInput(f"interval [{self.lo}, {self.hi}] has lo > hi")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self):
        return f"[{fmt_scalar(self.lo)},{fmt_scalar(self.hi)}]"


# --------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class ContinuousDomain:
    name: str
    bounds: tuple[Interval, ...]

    def __post_init__(self):
        bounds = tuple(b if isinstance(b, Interval) else Interval(*b) for b in self.bounds)
        if not bounds:
            raise MalformedInput(f"domain {self.name!r} needs at least one dimension")
        object.__setattr__(self, "bounds", bounds)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def point(self, p) -> tuple[Fraction, ...]:
        """Normalize ``p`` to a coordinate tuple, checking it lies in the domain."""
        if not isinstance(p, (tuple, list)):
            p = (p,)
        if len(p) != self.dim:
            raise DomainMismatch(f"point {p!r} has {len(p)} coordinates, domain {self.name!r} has {self.dim}")
        p = tuple(scalar(x) for x in p)
        for x, b in zip(p, self.bounds):
            if x not in b:
                raise DomainMismatch(f"point {fmt_point(p)} lies outside domain {self.name!r}")
        return p


@dataclass(frozen=True)
class LatticeDomain:
    """A finite join semilattice given by its element list and join table.

    ``table[i][j]`` is the index of ``join(elements[i], elements[j])``.  The
    semilattice laws are checked exhaustively on construction.
    """

    name: str
    elements: tuple
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        els = tuple(self.elements)
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "table", tuple(tuple(r) for r in self.table))
        n = len(els)
        if n == 0:
            raise MalformedInput(f"lattice {self.name!r} is empty")
        if len(set(els)) != n:
            raise MalformedInput(f"lattice {self.name!r} has duplicate elements")
        t = self.table
        if len(t) != n or any(len(r) != n for r in t):
            raise MalformedInput(f"join table of {self.name!r} is not {n}x{n}")
        for i in range(n):
            if t[i][i] != i:
                raise MalformedInput(f"join of {self.name!r} is not idempotent at {els[i]!r}")
            for j in range(n):
                if not 0 <= t[i][j] < n:
                    raise MalformedInput(f"join table of {self.name!r} has out-of-range entry")
                if t[i][j] != t[j][i]:
                    raise MalformedInput(f"join of {self.name!r} is not commutative")
        for i, j, k in itertools.product(range(n), repeat=3):
            if t[i][t[j][k]] != t[t[i][j]][k]:
                raise MalformedInput(f"join of {self.name!r} is not associative")
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(els)})

    def index(self, a) -> int:
        try:
            return self._index[a]
        except (KeyError, TypeError):
            raise DomainMismatch(f"{a!r} is not an element of lattice {self.name!r}") from None

    def point(self, a):
        self.index(a)
        return a

    def join(self, a, b):
        return self.elements[self.table[self.index(a)][self.index(b)]]

    def join_all(self, items: Iterable):
        return reduce(self.join, items)

    def leq(self, a, b) -> bool:
        return self.join(a, b) == b

    @classmethod
    def from_join(cls, name, elements, join):
        elements = tuple(elements)
        idx = {e: i for i, e in enumerate(elements)}
        table = [[idx[join(a, b)] for b in elements] for a in elements]
        return cls(name, elements, table)

    @classmethod
    def tuplemax(cls, name: str, k: int) -> "LatticeDomain":
        """Boolean k-tuples under element-wise max."""
        els = list(itertools.product((0, 1), repeat=k))
        return cls.from_join(name, els, lambda a, b: tuple(map(max, a, b)))

    @classmethod
    def from_tree(cls, name: str, tree) -> "LatticeDomain":
        """Tree nodes joined at their lowest common ancestor.

        ``tree`` is a label (leaf) or a tuple ``(label, child, ...)``.
        """
        parent: dict = {}
        order: list = []

        def walk(node, up):
            if isinstance(node, tuple):
                label, children = node[0], node[1:]
            else:
                label, children = node, ()
            if label in parent:
                raise MalformedInput(f"tree label {label!r} repeated in {name!r}")
            parent[label] = up
            order.append(label)
            for c in children:
                walk(c, label)

        walk(tree, None)

        def ancestors(a):
            out = []
            while a is not None:
                out.append(a)
                a = parent[a]
            return out

        def lca(a, b):
            up = set(ancestors(a))
            return next(x for x in ancestors(b) if x in up)

        dom = cls.from_join(name, order, lca)
        object.__setattr__(dom, "_tree", tree)
        return dom


AtomicDomain = Union[ContinuousDomain, LatticeDomain]


def fmt_point(p) -> str:
    if isinstance(p, tuple):
        return "(" + ",".join(fmt_point(x) for x in p) + ")"
    if isinstance(p, (int, Fraction)):
        return fmt_scalar(p)
    return str(p)


# --------------------------------------------------------------------------
# convex sets


class ConvexSet:
    """Base class: a nonempty convex subset of one atomic domain.

    Equality is semantic (mutual inclusion), so a box equals the polytope of
    its corners.  Hashing therefore only looks at the domain.
    """

    domain: AtomicDomain
    # display/DSL expression that rebuilds this set from named properties
    label: str | None = None

    def extreme_points(self) -> list:
        raise NotImplementedError

    def literal(self) -> str:
        """Explicit rendering that never relies on ``label``."""
        return str(self)

    def labelled(self, label: str | None) -> "ConvexSet":
        out = _copy.copy(self)
        out.label = label
        return out

    @property
    def is_singleton(self) -> bool:
        raise NotImplementedError

    def __contains__(self, point) -> bool:
        return member(self, point)

    def __eq__(self, other):
        if not isinstance(other, ConvexSet):
            return NotImplemented
        return same_set(self, other)

    def __hash__(self):
        return hash(self.domain)

    def __repr__(self):
        return f"{type(self).__name__}<{self.domain.name}>{self}"


class Box(ConvexSet):
    def __init__(self, domain: ContinuousDomain, intervals: Sequence):
        if not isinstance(domain, ContinuousDomain):
            raise DomainMismatch(f"boxes live on continuous domains, not {domain.name!r}")
        ivs = tuple(iv if isinstance(iv, Interval) else Interval(*iv) for iv in intervals)
        if len(ivs) != domain.dim:
            raise DomainMismatch(f"box has {len(ivs)} intervals, domain {domain.name!r} has {domain.dim}")
        for iv, b in zip(ivs, domain.bounds):
            if iv.lo < b.lo or iv.hi > b.hi:
                raise DomainMismatch(f"box {iv} exceeds domain {domain.name!r} bounds {b}")
        self.domain = domain
        self.intervals = ivs

    @classmethod
    def full(cls, domain: ContinuousDomain) -> "Box":
        return cls(domain, domain.bounds)

    @property
    def is_singleton(self) -> bool:
        return all(iv.width == 0 for iv in self.intervals)

    def extreme_points(self) -> list:
        return list(dict.fromkeys(itertools.product(*[(iv.lo, iv.hi) for iv in self.intervals])))

    def structurally_equal(self, other) -> bool:
        return isinstance(other, Box) and self.domain == other.domain and self.intervals == other.intervals

    def __str__(self):
        return "x".join(str(iv) for iv in self.intervals)


class Polytope(ConvexSet):
    def __init__(self, domain: ContinuousDomain, vertices: Sequence):
        if not isinstance(domain, ContinuousDomain):
            raise DomainMismatch(f"polytopes live on continuous domains, not {domain.name!r}")
        vs = tuple(domain.point(v) for v in vertices)
        if not vs:
            raise MalformedInput("a polytope needs at least one vertex")
        self.domain = domain
        self.vertices = vs

    @property
    def is_singleton(self) -> bool:
        return len(set(self.vertices)) == 1

    def extreme_points(self) -> list:
        return list(self.vertices)

    def canonical(self) -> "Polytope":
        """Drop duplicate and non-extreme vertices, keeping first-seen order."""
        return Polytope(self.domain, _extreme_vertices(self.domain, self.vertices))

    def literal(self) -> str:
        return "hull(" + ",".join(fmt_point(v) for v in self.vertices) + ")"

    def __str__(self):
        return self.label or self.literal()


class LatticeSet(ConvexSet):
    def __init__(self, domain: LatticeDomain, members: Iterable):
        if not isinstance(domain, LatticeDomain):
            raise DomainMismatch(f"lattice sets live on lattice domains, not {domain.name!r}")
        ms = frozenset(domain.point(m) for m in members)
        if not ms:
            raise MalformedInput("a lattice set needs at least one member")
        for a in ms:
            for b in ms:
                if domain.join(a, b) not in ms:
                    raise MalformedInput(
                        f"{{{', '.join(fmt_point(m) for m in ms)}}} is not join-closed in {domain.name!r}")
        self.domain = domain
        self.members = ms

    @classmethod
    def full(cls, domain: LatticeDomain) -> "LatticeSet":
        return cls(domain, domain.elements)

    @property
    def is_singleton(self) -> bool:
        return len(self.members) == 1

    def extreme_points(self) -> list:
        return self.sorted_members()

    def sorted_members(self) -> list:
        return sorted(self.members, key=self.domain.index)

    def __str__(self):
        return "{" + ",".join(fmt_point(m) for m in self.sorted_members()) + "}"


def full_set(domain: AtomicDomain) -> ConvexSet:
    if isinstance(domain, LatticeDomain):
        return LatticeSet.full(domain)
    return Box.full(domain)


# --------------------------------------------------------------------------
# formal sums and mixing


def _exact_sum(values) -> Fraction:
    if _mpq is None:
        return sum(values, Fraction(0))
    acc = _mpq(0)
    for v in values:
        acc += _mpq(v.numerator, v.denominator)
    return Fraction(int(acc.numerator), int(acc.denominator))


@dataclass(frozen=True)
class FormalConvexSum:
    """A finite formal convex combination ``sum_i w_i |x_i>``.

    Points may themselves be :class:`FormalConvexSum` instances, giving
    the nested sums used to state the flattening axiom.
    """

    entries: tuple

    def __post_init__(self):
        entries = tuple((scalar(w), x) for w, x in self.entries)
        if not entries:
            raise MalformedSum("empty formal sum")
        if any(w.numerator < 0 for w, _ in entries):
            raise MalformedSum("negative weight in formal sum")
        total = _exact_sum(w for w, _ in entries)
        if total != 1:
            raise MalformedSum(f"weights sum to {fmt_scalar(total)}, not 1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def unit(cls, x) -> "FormalConvexSum":
        return cls(((1, x),))

    def flatten(self) -> "FormalConvexSum":
        """Multiply out one level of nesting."""
        out = []
        for p, inner in self.entries:
            if not isinstance(inner, FormalConvexSum):
                raise MalformedSum("flatten needs a sum of sums")
            out.extend((p * q, a) for q, a in inner.entries)
        return FormalConvexSum(tuple(out))


def mix(domain: AtomicDomain, fsum: FormalConvexSum):
    """Evaluate a formal convex sum with the domain's mixing operation."""
    if not isinstance(fsum, FormalConvexSum):
        fsum = FormalConvexSum(tuple(fsum))
    if isinstance(domain, LatticeDomain):
        pts = [domain.point(x) for w, x in fsum.entries]
        live = [x for (w, _), x in zip(fsum.entries, pts) if w.numerator > 0]
        return domain.join_all(live)
    pts = [domain.point(x) for _, x in fsum.entries]
    return tuple(
        sum((w * p[i] for (w, _), p in zip(fsum.entries, pts)), Fraction(0))
        for i in range(domain.dim))


def flatten_check(domain: AtomicDomain, nested: FormalConvexSum) -> bool:
    """True iff mixing the flattened sum equals mixing the inner mixes."""
    flat = mix(domain, nested.flatten())
    inner = FormalConvexSum(tuple((p, mix(domain, s)) for p, s in nested.entries))
    return flat == mix(domain, inner)


# --------------------------------------------------------------------------
# membership, meets, containment


def _same_domain(a: ConvexSet, b: ConvexSet):
    if a.domain != b.domain:
        raise DomainMismatch(f"sets on different domains {a.domain.name!r} and {b.domain.name!r}")


@lru_cache(maxsize=512)
def _extreme_vertices(domain: ContinuousDomain, vertices: tuple) -> tuple:
    vs = list(dict.fromkeys(vertices))
    d = domain.dim
    centroid = tuple(sum(v[k] for v in vs) / len(vs) for k in range(d))
    i = 0
    while i < len(vs) and len(vs) > 1:
        rest = vs[:i] + vs[i + 1:]
        if _exposed(vs[i], rest, centroid):
            i += 1
        elif _in_hull(rest, vs[i]):
            vs = rest
        else:
            i += 1
    return tuple(vs)


def _exposed(v: tuple, others: Sequence[tuple], centroid: tuple) -> bool:
    """Cheap sufficient test for extremality: ``v`` uniquely maximizes
    the functional pointing from the centroid (or its sign pattern)."""
    direction = tuple(a - c for a, c in zip(v, centroid))
    signs = tuple((a > 0) - (a < 0) for a in direction)
    for f in (direction, signs):
        if not any(f):
            continue
        top = sum(a * b for a, b in zip(f, v))
        if all(sum(a * b for a, b in zip(f, w)) < top for w in others):
            return True
    return False


def _in_hull(vertices: Sequence[tuple], point: tuple) -> bool:
    if point in vertices:
        return True
    d = len(point)
    for i in range(d):
        coords = [v[i] for v in vertices]
        if not min(coords) <= point[i] <= max(coords):
            return False
    lp = LinearProgram()
    lam = lp.vars(len(vertices), nonneg=True)
    lp.add({l: 1 for l in lam}, "==", 1)
    for i in range(d):
        lp.add({l: v[i] for l, v in zip(lam, vertices)}, "==", point[i])
    return lp.feasible().feasible


def member(s: ConvexSet, point) -> bool:
    point = s.domain.point(point)
    if isinstance(s, LatticeSet):
        return point in s.members
    if isinstance(s, Box):
        return all(x in iv for x, iv in zip(point, s.intervals))
    return _in_hull(s.vertices, point)


def subset(a: ConvexSet, b: ConvexSet) -> bool:
    """``a ⊆ b``, decided on the extreme points of ``a``."""
    _same_domain(a, b)
    if a is b:
        return True
    if isinstance(a, LatticeSet):
        return a.members <= b.members
    if isinstance(a, Box) and isinstance(b, Box):
        return all(y.lo <= x.lo and x.hi <= y.hi for x, y in zip(a.intervals, b.intervals))
    if isinstance(a, Polytope) and isinstance(b, Polytope) and set(a.vertices) <= set(b.vertices):
        return True
    return all(member(b, p) for p in a.extreme_points())


def same_set(a: ConvexSet, b: ConvexSet) -> bool:
    if a.domain != b.domain:
        return False
    return subset(a, b) and subset(b, a)


def _box_relints_meet(a: Box, b: Box) -> bool:
    for x, y in zip(a.intervals, b.intervals):
        if x.width and y.width:
            if not max(x.lo, y.lo) < min(x.hi, y.hi):
                return False
        elif x.width:
            if not x.lo < y.lo < x.hi:
                return False
        elif y.width:
            if not y.lo < x.lo < y.hi:
                return False
        elif x.lo != y.lo:
            return False
    return True


def _relints_meet(sets: Sequence[ConvexSet]) -> bool:
    """Is there a point in the relative interior of every set?

    One LP maximizing a common margin ``t``: box coordinates of positive
    width get ``lo + t <= x <= hi - t``; a polytope with ``n`` vertices
    gets weights ``t + l_i`` with ``l_i >= 0``.
    """
    if len(sets) == 2 and all(isinstance(s, Box) for s in sets):
        return _box_relints_meet(*sets)
    d = sets[0].domain.dim
    lp = LinearProgram()
    x = lp.vars(d)
    t = lp.var()
    lp.add({t: 1}, "<=", 1)
    for s in sets:
        if isinstance(s, Box):
            for i, iv in enumerate(s.intervals):
                if iv.width:
                    lp.add({x[i]: 1, t: -1}, ">=", iv.lo)
                    lp.add({x[i]: 1, t: 1}, "<=", iv.hi)
                else:
                    lp.add({x[i]: 1}, "==", iv.lo)
            continue
        vs = list(dict.fromkeys(s.vertices))
        if len(vs) == 1:
            for i in range(d):
                lp.add({x[i]: 1}, "==", vs[0][i])
            continue
        lam = lp.vars(len(vs), nonneg=True)
        row = {l: 1 for l in lam}
        row[t] = len(vs)
        lp.add(row, "==", 1)
        for i in range(d):
            row = {l: v[i] for l, v in zip(lam, vs)}
            row[t] = sum(v[i] for v in vs)
            row[x[i]] = -1
            lp.add(row, "==", 0)
    sol = lp.maximize({t: 1})
    return sol.feasible and sol.objective > 0


def meets(a: ConvexSet, b: ConvexSet) -> bool:
    """Do ``a`` and ``b`` overlap in a non-degenerate way?

    Lattice sets meet when they share a member.  Continuous sets meet when
    one contains the other or their relative interiors intersect, so two
    boxes sharing only a face do not meet.
    """
    _same_domain(a, b)
    if isinstance(a, LatticeSet):
        return not a.members.isdisjoint(b.members)
    if a is b:
        return True
    if _relints_meet([a, b]):
        return True
    return subset(a, b) or subset(b, a)


def _minimal(sets: Sequence[ConvexSet]) -> list[ConvexSet]:
    """Drop every set that contains another member of the list."""
    keep = list(sets)
    i = 0
    while i < len(keep):
        s = keep[i]
        if any(j != i and subset(o, s) for j, o in enumerate(keep)):
            del keep[i]
        else:
            i += 1
    return keep


def meets_all(sets: Sequence[ConvexSet]) -> bool:
    """k-ary :func:`meets`; for two sets it agrees with ``meets`` exactly."""
    if not sets:
        raise MalformedInput("meets_all needs at least one set")
    for s in sets[1:]:
        _same_domain(sets[0], s)
    if isinstance(sets[0], LatticeSet):
        return bool(reduce(frozenset.intersection, (s.members for s in sets)))
    if len(sets) == 2:
        return meets(*sets)
    # collapse containment chains first, duplicates keep one copy
    uniq = []
    for s in sets:
        if not any(same_set(s, u) for u in uniq):
            uniq.append(s)
    core = _minimal(uniq)
    if len(core) <= 1:
        return True
    if len(core) == 2:
        return meets(*core)
    return _relints_meet(core)


def intersect(a: ConvexSet, b: ConvexSet) -> ConvexSet:
    _same_domain(a, b)
    if isinstance(a, LatticeSet):
        common = a.members & b.members
        if not common:
            raise EmptyIntersection(f"{a} and {b} are disjoint")
        return LatticeSet(a.domain, common)
    if not meets(a, b):
        raise EmptyIntersection(f"{a} and {b} do not meet")
    if isinstance(a, Box) and isinstance(b, Box):
        return Box(a.domain, [Interval(max(x.lo, y.lo), min(x.hi, y.hi))
                              for x, y in zip(a.intervals, b.intervals)])
    if subset(a, b):
        return a
    if subset(b, a):
        return b
    ra, rb = _hrep(a), _hrep(b)
    if ra is not None and rb is not None:
        vs = polyhedra.vertices(a.domain.dim, ra[0] + rb[0], ra[1] + rb[1])
        if vs:
            return _boxed(Polytope(a.domain, vs).canonical())
    raise UnsupportedIntersection(f"intersection of {a} and {b} is too large to enumerate")


def _boxed(p: Polytope) -> ConvexSet:
    """The same set as a :class:`Box` when its vertices are exactly box corners."""
    d = p.domain.dim
    ivs = [Interval(min(v[i] for v in p.vertices), max(v[i] for v in p.vertices)) for i in range(d)]
    corners = set(itertools.product(*[(iv.lo, iv.hi) for iv in ivs]))
    if set(p.vertices) == corners:
        return Box(p.domain, ivs)
    return p


def _hrep(s: ConvexSet):
    if isinstance(s, Box):
        return polyhedra.box_hrep(s.intervals)
    return polyhedra.hrep(s.vertices)


def intersect_all(sets: Sequence[ConvexSet]) -> ConvexSet:
    return reduce(intersect, sets)


def hull(domain: AtomicDomain, parts: Sequence[ConvexSet], canonical: bool = True) -> ConvexSet:
    """Convex hull of the union of ``parts``."""
    if not parts:
        raise MalformedInput("hull of no parts")
    for p in parts:
        if p.domain != domain:
            raise DomainMismatch(f"hull part on {p.domain.name!r}, expected {domain.name!r}")
    if len(parts) == 1:
        return parts[0]
    if isinstance(domain, LatticeDomain):
        members = set()
        for p in parts:
            members |= p.members
        return LatticeSet(domain, join_closure(domain, members))
    pts = [v for p in parts for v in p.extreme_points()]
    poly = Polytope(domain, pts)
    if canonical:
        poly = _boxed(poly.canonical())
    if all(p.label for p in parts):
        names = []
        for p in parts:
            inner = p.label[5:-1] if p.label.startswith("hull(") else p.label
            names.extend(n for n in inner.split(",") if n not in names)
        poly.label = "hull(" + ",".join(names) + ")"
    return poly


def join_closure(domain: LatticeDomain, members: Iterable) -> frozenset:
    closed = set(members)
    frontier = list(closed)
    while frontier:
        a = frontier.pop()
        for b in list(closed):
            j = domain.join(a, b)
            if j not in closed:
                closed.add(j)
                frontier.append(j)
    return frozenset(closed)


def is_join_closed(domain: LatticeDomain, members: Iterable) -> bool:
    ms = set(members)
    return all(domain.join(a, b) in ms for a in ms for b in ms)
