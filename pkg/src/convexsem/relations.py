"""Convex relations as finite unions of cells.

A :class:`Cell` is a product of convex sets, one per atomic factor, except
that some positions may be *tied*: forced to hold the same point.  Tied
positions are how the diagonal-shaped structure maps (caps, cups, copy,
merge, intersective adjectives) stay finite.  None of those is a finite
union of plain products, but each is a single tied cell, and a cup
applied to tied cells is just a merge of tie classes.

Positions of a cell run over ``source.factors + target.factors``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .convex import (AtomicDomain, Box, ConvexSet, FormalConvexSum, LatticeDomain,
                     LatticeSet, Polytope, full_set, intersect_all, meets_all, member,
                     mix, subset)
from .errors import MalformedPlan, SpaceMismatch

_ENUMERATION_LIMIT = 100_000


@dataclass(frozen=True)
class Space:
    """Ordered tensor product of atomic domains; ``Space(())`` is the unit I."""

    factors: tuple = ()
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __matmul__(self, other: "Space") -> "Space":
        return Space(self.factors + other.factors)

    @property
    def is_unit(self) -> bool:
        return not self.factors

    @property
    def is_lattice(self) -> bool:
        return all(isinstance(d, LatticeDomain) for d in self.factors)

    def __str__(self):
        if self.name:
            return self.name
        if not self.factors:
            return "I"
        return "⊗".join(d.name for d in self.factors)


UNIT = Space(())


def _canon_classes(classes: Sequence[int]) -> tuple[int, ...]:
    first: dict[int, int] = {}
    return tuple(first.setdefault(c, i) for i, c in enumerate(classes))


class Cell:
    """A product of per-position convex sets with optional ties.

    ``classes[i]`` labels the tie class of position ``i``; positions with
    the same label hold one common point from the class region.  Labels
    are normalized to the index of the first position in each class.
    """

    __slots__ = ("components", "classes")

    def __init__(self, components: Sequence[ConvexSet], classes: Sequence[int] | None = None):
        components = tuple(components)
        if classes is None:
            classes = range(len(components))
        classes = _canon_classes(classes)
        if len(classes) != len(components):
            raise MalformedPlan("tie labels do not match component count")
        for i, c in enumerate(classes):
            if c != i:
                lead = components[c]
                if components[i] is not lead:
                    if components[i].domain != lead.domain or components[i] != lead:
                        raise SpaceMismatch(f"tied positions {c} and {i} disagree")
                    components = components[:i] + (lead,) + components[i + 1:]
        self.components = components
        self.classes = classes

    @classmethod
    def product(cls, *components: ConvexSet) -> "Cell":
        return cls(components)

    @property
    def domains(self) -> tuple:
        return tuple(c.domain for c in self.components)

    @property
    def is_product(self) -> bool:
        return all(c == i for i, c in enumerate(self.classes))

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, c in enumerate(self.classes):
            out.setdefault(c, []).append(i)
        return out

    def permute(self, order: Sequence[int]) -> "Cell":
        return Cell([self.components[i] for i in order], [self.classes[i] for i in order])

    def __add__(self, other: "Cell") -> "Cell":
        n = len(self.components)
        return Cell(self.components + other.components,
                    self.classes + tuple(c + n for c in other.classes))

    def contains(self, point: Sequence) -> bool:
        for lead, pos in self.groups().items():
            if any(point[p] != point[lead] for p in pos):
                return False
        # cheap shapes first, polytope LPs last
        order = sorted(self.groups(), key=lambda i: isinstance(self.components[i], Polytope))
        return all(member(self.components[i], point[i]) for i in order)

    def subsumed_by(self, other: "Cell") -> bool:
        """Exact test of ``self ⊆ other`` as point sets."""
        if self.domains != other.domains:
            return False
        for pos in other.groups().values():
            labels = list(dict.fromkeys(self.classes[p] for p in pos))
            if len(labels) > 1:
                comps = [self.components[l] for l in labels]
                if not all(c.is_singleton for c in comps):
                    return False
                pts = {c.extreme_points()[0] for c in comps}
                if len(pts) != 1:
                    return False
            target = other.components[pos[0]]
            if not all(subset(self.components[l], target) for l in labels):
                return False
        return True

    def tuples(self) -> set[tuple]:
        """Enumerate the cell's points (lattice factors only)."""
        groups = self.groups()
        leads = list(groups)
        choices = [self.components[l].sorted_members() for l in leads]
        out = set()
        for combo in itertools.product(*choices):
            pt = [None] * len(self.components)
            for lead, value in zip(leads, combo):
                for p in groups[lead]:
                    pt[p] = value
            out.add(tuple(pt))
        return out

    def __str__(self):
        parts = []
        for i, (c, comp) in enumerate(zip(self.classes, self.components)):
            parts.append(f"={c}" if c != i else str(comp))
        return " × ".join(parts) if parts else "*"

    def __repr__(self):
        return f"Cell({self})"


def _cells_size(space_factors) -> int:
    size = 1
    for d in space_factors:
        if not isinstance(d, LatticeDomain):
            return -1
        size *= len(d.elements)
    return size


class Relation:
    """A convex relation ``source → target`` held as a union of cells.

    Equality is semantic: exact point-set comparison on small all-lattice
    spaces, mutual cell-wise subsumption otherwise.
    """

    __slots__ = ("source", "target", "cells")

    def __init__(self, source: Space, target: Space, cells: Iterable[Cell] = ()):
        cells = tuple(cells)
        want = source.factors + target.factors
        for c in cells:
            if c.domains != want:
                raise SpaceMismatch(f"cell {c} does not span {source} → {target}")
        self.source = source
        self.target = target
        self.cells = cells

    @classmethod
    def state(cls, target: Space, cells: Iterable[Cell]) -> "Relation":
        return cls(UNIT, target, cells)

    @property
    def is_state(self) -> bool:
        return self.source.is_unit

    @property
    def is_empty(self) -> bool:
        return not self.cells

    @property
    def space(self) -> Space:
        return self.source @ self.target

    def as_state(self) -> "Relation":
        """The same cells viewed as a state on ``source ⊗ target``."""
        return Relation(UNIT, self.source @ self.target, self.cells)

    def canonical(self) -> "Relation":
        return Relation(self.source, self.target, canonical_cells(self.cells))

    def tuples(self) -> set[tuple]:
        out = set()
        for c in self.cells:
            out |= c.tuples()
        return out

    def contains(self, point: Sequence) -> bool:
        return any(c.contains(point) for c in self.cells)

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        size = _cells_size(self.space.factors)
        if 0 <= size <= _ENUMERATION_LIMIT:
            return self.tuples() == other.tuples()
        return (all(any(c.subsumed_by(d) for d in other.cells) for c in self.cells)
                and all(any(d.subsumed_by(c) for c in self.cells) for d in other.cells))

    def __hash__(self):
        return hash((self.source, self.target))

    def __str__(self):
        if not self.cells:
            return "∅"
        return " ∪ ".join(f"({c})" if len(self.cells) > 1 else str(c) for c in self.cells)

    def __repr__(self):
        return f"Relation({self.source} → {self.target}: {self})"


def canonical_cells(cells: Sequence[Cell]) -> tuple[Cell, ...]:
    """Drop cells contained in another cell (first copy of duplicates wins)."""
    keep = []
    for i, c in enumerate(cells):
        redundant = False
        for j, d in enumerate(cells):
            if i == j:
                continue
            if c.subsumed_by(d) and (j < i or not d.subsumed_by(c)):
                redundant = True
                break
        if not redundant:
            keep.append(c)
    return tuple(keep)


# --------------------------------------------------------------------------
# contraction: the one primitive behind cups, composition and plans


def _contract(cell: Cell, pairs: Sequence[tuple[int, int]], survivors: Sequence[int]) -> Cell | None:
    """Equate each pair of positions, then keep ``survivors`` in order.

    Positions neither paired nor surviving are projected away.  Returns
    None when some merged tie class has no common point (in the sense of
    :func:`meets_all`).
    """
    parent = {c: c for c in set(cell.classes)}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for p, q in pairs:
        a, b = find(cell.classes[p]), find(cell.classes[q])
        if a != b:
            parent[max(a, b)] = min(a, b)

    members: dict[int, list[int]] = {}
    for c in parent:
        members.setdefault(find(c), []).append(c)

    # every merged class must be inhabited before anything is materialized
    regions: dict[int, list[ConvexSet]] = {}
    for root, labels in members.items():
        regs = []
        for l in sorted(labels):
            comp = cell.components[l]
            if not any(comp is r for r in regs):
                regs.append(comp)
        if len(regs) > 1 and not meets_all(regs):
            return None
        regions[root] = regs

    out_comps, out_classes, made = [], [], {}
    for s in survivors:
        root = find(cell.classes[s])
        if root not in made:
            regs = regions[root]
            made[root] = regs[0] if len(regs) == 1 else intersect_all(regs)
        out_comps.append(made[root])
        out_classes.append(root)
    return Cell(out_comps, out_classes)


@dataclass(frozen=True)
class WirePlan:
    """Contract ``pairs`` of atomic wires, then output ``survivors`` in order.

    Wires mentioned in neither list are discarded (existentially projected),
    which is how a delete map on a wire is expressed.
    """

    pairs: tuple[tuple[int, int], ...] = ()
    survivors: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        object.__setattr__(self, "survivors", tuple(self.survivors))
        seen = set()
        for w in [w for p in self.pairs for w in p] + list(self.survivors):
            if w in seen:
                raise MalformedPlan(f"wire {w} used twice")
            seen.add(w)
        if any(len(p) != 2 for p in self.pairs):
            raise MalformedPlan("contractions are pairs of wires")


def apply_wire_plan(plan: WirePlan, state: Relation) -> Relation:
    if not state.is_state:
        raise SpaceMismatch("wire plans apply to states (relations from I)")
    factors = state.target.factors
    n = len(factors)
    for w in [w for p in plan.pairs for w in p] + list(plan.survivors):
        if not 0 <= w < n:
            raise MalformedPlan(f"wire {w} out of range for a {n}-factor state")
    for p, q in plan.pairs:
        if factors[p] != factors[q]:
            raise SpaceMismatch(f"cannot contract {factors[p].name!r} with {factors[q].name!r}")
    target = Space([factors[s] for s in plan.survivors])
    cells = []
    for cell in state.cells:
        out = _contract(cell, plan.pairs, plan.survivors)
        if out is not None:
            cells.append(out)
    return Relation(UNIT, target, canonical_cells(cells))


# --------------------------------------------------------------------------
# categorical structure


def _diagonal(space: Space, copies: int) -> Cell:
    """One cell tying ``copies`` copies of each factor of ``space``."""
    n = len(space)
    comps = [full_set(d) for d in space.factors] * copies
    classes = [i % n for i in range(n * copies)] if n else []
    return Cell(comps, classes)


def identity(space: Space) -> Relation:
    return Relation(space, space, [_diagonal(space, 2)])


def cap(space: Space) -> Relation:
    """``{(*, (a, a))}``: I → space ⊗ space."""
    return Relation(UNIT, space @ space, [_diagonal(space, 2)])


def cup(space: Space) -> Relation:
    """``{((a, a), *)}``: space ⊗ space → I."""
    return converse(cap(space))


def copy(space: Space) -> Relation:
    return Relation(space, space @ space, [_diagonal(space, 3)])


def merge(space: Space) -> Relation:
    return converse(copy(space))


def delete(space: Space) -> Relation:
    return Relation(space, UNIT, [Cell([full_set(d) for d in space.factors])])


def converse(r: Relation) -> Relation:
    a, b = len(r.source), len(r.target)
    order = list(range(a, a + b)) + list(range(a))
    return Relation(r.target, r.source, [c.permute(order) for c in r.cells])


def tensor(r: Relation, t: Relation) -> Relation:
    a, b, c, d = len(r.source), len(r.target), len(t.source), len(t.target)
    # concatenated layout is [r.src, r.tgt, t.src, t.tgt]
    order = (list(range(a)) + list(range(a + b, a + b + c))
             + list(range(a, a + b)) + list(range(a + b + c, a + b + c + d)))
    cells = [(x + y).permute(order) for x in r.cells for y in t.cells]
    return Relation(r.source @ t.source, r.target @ t.target, cells)


def compose(r: Relation, t: Relation) -> Relation:
    """Relational composite ``r ; t`` (first ``r``, then ``t``)."""
    if r.target != t.source:
        raise SpaceMismatch(f"cannot compose {r.source} → {r.target} with {t.source} → {t.target}")
    a, b, c = len(r.source), len(r.target), len(t.target)
    pairs = [(a + i, a + b + i) for i in range(b)]
    survivors = list(range(a)) + list(range(a + 2 * b, a + 2 * b + c))
    cells = []
    for x in r.cells:
        for y in t.cells:
            out = _contract(x + y, pairs, survivors)
            if out is not None:
                cells.append(out)
    return Relation(r.source, t.target, canonical_cells(cells))


def apply(r: Relation, state: Relation) -> Relation:
    """Image of a state under a relation."""
    return compose(state, r)


# --------------------------------------------------------------------------
# convexity audit


@dataclass
class AuditReport:
    exhaustive: bool
    checked: int
    violations: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations


def _representatives(region: ConvexSet) -> list:
    if isinstance(region, LatticeSet):
        return region.sorted_members()
    if isinstance(region, Box):
        lo = tuple(iv.lo for iv in region.intervals)
        hi = tuple(iv.hi for iv in region.intervals)
        mid = tuple((iv.lo + iv.hi) / 2 for iv in region.intervals)
        return list(dict.fromkeys([mid, lo, hi]))
    vs = region.vertices
    centroid = tuple(sum(v[i] for v in vs) / len(vs) for i in range(region.domain.dim))
    return list(dict.fromkeys([centroid, vs[0], vs[-1]]))


def _sample_points(cell: Cell, k: int, rng: random.Random) -> list[tuple]:
    groups = cell.groups()
    reps = {lead: _representatives(cell.components[lead]) for lead in groups}
    pts = []
    for _ in range(k):
        pt = [None] * len(cell.components)
        for lead, pos in groups.items():
            v = rng.choice(reps[lead])
            for p in pos:
                pt[p] = v
        pts.append(tuple(pt))
    return list(dict.fromkeys(pts))


def _midpoint(domains, x, y) -> tuple:
    half = Fraction(1, 2)
    return tuple(mix(d, FormalConvexSum(((half, a), (half, b)))) for d, a, b in zip(domains, x, y))


def convexity_audit(state: Relation, samples: int = 6, seed: int = 0) -> AuditReport:
    """Look for mixtures of points of the union that fall outside it.

    All-lattice states are checked exhaustively for join closure.  With a
    continuous factor, a few representative points are drawn per cell and
    midpoints across distinct cells are tested; findings are warnings.
    """
    if not state.is_state:
        state = state.as_state()
    domains = state.target.factors
    size = _cells_size(domains)
    if 0 <= size <= _ENUMERATION_LIMIT:
        pts = sorted(state.tuples(), key=repr)
        present = set(pts)
        report = AuditReport(exhaustive=True, checked=0)
        for x, y in itertools.combinations(pts, 2):
            report.checked += 1
            j = tuple(d.join(a, b) for d, a, b in zip(domains, x, y))
            if j not in present:
                report.violations.append((x, y, j))
        return report

    rng = random.Random(seed)
    drawn = [_sample_points(c, samples, rng) for c in state.cells]
    report = AuditReport(exhaustive=False, checked=0)
    for i, j in itertools.combinations(range(len(drawn)), 2):
        for x in drawn[i]:
            for y in drawn[j]:
                report.checked += 1
                m = _midpoint(domains, x, y)
                if not state.contains(m):
                    report.violations.append((x, y, m))
    return report
