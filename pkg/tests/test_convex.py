import itertools
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from convexsem.convex import (Box, ContinuousDomain, FormalConvexSum, Interval, LatticeDomain,
                              LatticeSet, Polytope, flatten_check, fmt_scalar, full_set, hull,
                              intersect, is_join_closed, meets, meets_all, member, mix, scalar,
                              subset)
from convexsem.errors import (DomainMismatch, EmptyIntersection, MalformedInput, MalformedSum,
                              UnsupportedIntersection)

SQ = ContinuousDomain("sq", [(0, 4), (0, 4)])
LINE = ContinuousDomain("line", [(0, 1)])
TASTE = ContinuousDomain("taste", [(0, 1)] * 5)


def taste_box(k):
    return Box(TASTE, [(F(1, 2), 1) if i == k else (0, F(1, 2)) for i in range(5)])


# -- scalars and domains


def test_scalar_rejects_floats_and_bools():
    with pytest.raises(MalformedInput):
        scalar(0.1)
    with pytest.raises(MalformedInput):
        scalar(True)
    assert scalar("3/5") == F(3, 5) and scalar("0.35") == F(7, 20)


@pytest.mark.parametrize("q,text", [(F(3, 4), "0.75"), (F(1, 3), "1/3"), (F(-1, 8), "-0.125"),
                                    (F(60), "60")])
def test_fmt_scalar(q, text):
    assert fmt_scalar(q) == text


def test_interval_display_and_membership():
    iv = Interval(F(1, 5), F(1, 2))
    assert str(iv) == "[0.2,0.5]" and F(1, 3) in iv and 1 not in iv
    with pytest.raises(MalformedInput):
        Interval(2, 1)


def test_point_out_of_bounds():
    with pytest.raises(DomainMismatch):
        SQ.point((5, 0))
    assert LINE.point(F(1, 2)) == (F(1, 2),)


def test_lattice_laws_are_checked():
    with pytest.raises(MalformedInput):
        LatticeDomain("bad", ("a", "b"), ((0, 0), (1, 1)))  # not commutative
    cube = LatticeDomain.tuplemax("c", 3)
    assert len(cube.elements) == 8 and cube.join((1, 0, 0), (0, 0, 1)) == (1, 0, 1)


def test_tree_join_is_lowest_common_ancestor():
    food = LatticeDomain.from_tree("food", ("food", ("fruit", "apples", "bananas"), "beer"))
    assert food.join("apples", "bananas") == "fruit"
    assert food.join("apples", "beer") == "food"
    assert food.leq("bananas", "fruit") and not food.leq("fruit", "bananas")


def test_lattice_set_must_be_join_closed():
    food = LatticeDomain.from_tree("food", ("food", ("fruit", "apples", "bananas"), "beer"))
    with pytest.raises(MalformedInput):
        LatticeSet(food, ["apples", "bananas"])
    assert is_join_closed(food, ["apples", "bananas", "fruit"])
    assert hull(food, [LatticeSet(food, ["apples"]), LatticeSet(food, ["beer"])]).members == \
        {"apples", "beer", "food"}


# -- sets


def test_box_equals_polytope_of_its_corners():
    b = Box(SQ, [(1, 3), (0, 2)])
    p = Polytope(SQ, b.extreme_points())
    assert b == p and p == b
    assert b != Box(SQ, [(1, 3), (0, 3)])


def test_hull_of_two_taste_boxes():
    sweet, bitter = taste_box(0), taste_box(2)
    h = hull(TASTE, [sweet.labelled("sweet"), bitter.labelled("bitter")])
    # 64 corners, 8 shared pairs collapse, and the 8 shared-face midpoints are not extreme
    assert len(h.vertices) == 48
    assert str(h) == "hull(sweet,bitter)"
    assert subset(sweet, h) and subset(bitter, h)
    assert member(h, (F(1, 2), 0, F(1, 2), 0, 0))
    assert not member(h, (1, 0, 1, 0, 0))


def test_hull_labels_flatten():
    s = [taste_box(k).labelled(n) for k, n in enumerate(("sweet", "sour", "bitter"))]
    inner = hull(TASTE, s[:2])
    assert str(hull(TASTE, [inner, s[2]])) == "hull(sweet,sour,bitter)"
    assert hull(TASTE, [inner, s[2]]) == hull(TASTE, s)


def test_faces_do_not_meet_but_containment_does():
    a, b = Box(SQ, [(0, 2), (0, 2)]), Box(SQ, [(2, 4), (0, 2)])
    assert not meets(a, b)
    with pytest.raises(EmptyIntersection):
        intersect(a, b)
    seg = Box(SQ, [(2, 2), (0, 1)])
    assert meets(seg, a) and intersect(a, seg) == seg
    assert not meets(taste_box(0), taste_box(2))


def test_overlapping_polytopes_are_intersected_exactly():
    tri = Polytope(SQ, [(0, 0), (4, 0), (0, 4)])
    tri2 = Polytope(SQ, [(4, 4), (0, 4), (4, 0)])
    assert not meets(tri, tri2)  # only the diagonal edge is shared
    sq = Polytope(SQ, [(1, 1), (3, 1), (1, 3), (3, 3)])
    assert set(intersect(tri, sq).vertices) == {(1, 1), (3, 1), (1, 3)}
    # box-shaped results come back as boxes
    assert intersect(sq, Box(SQ, [(0, 2), (0, 4)])).structurally_equal(Box(SQ, [(1, 2), (1, 3)]))


def test_large_intersections_are_refused():
    sweet, sour, bitter = taste_box(0), taste_box(1), taste_box(2)
    with pytest.raises(UnsupportedIntersection):
        intersect(hull(TASTE, [sweet, bitter]), hull(TASTE, [sweet, sour]))


def test_meets_all_three_way():
    a = Box(SQ, [(0, 2), (0, 4)])
    b = Box(SQ, [(1, 3), (0, 4)])
    c = Polytope(SQ, [(0, 0), (4, 0), (0, 4)])
    assert meets_all([a, b, c])
    d = Box(SQ, [(2, 4), (3, 4)])
    assert not meets_all([a, b, c, d])


# -- mixing


def test_malformed_sums():
    with pytest.raises(MalformedSum):
        FormalConvexSum(((F(1, 2), 0), (F(1, 3), 1)))
    with pytest.raises(MalformedSum):
        FormalConvexSum(((F(3, 2), 0), (F(-1, 2), 1)))
    with pytest.raises(MalformedSum):
        FormalConvexSum(())


def test_lattice_mix_ignores_zero_weights():
    cube = LatticeDomain.tuplemax("c", 2)
    s = FormalConvexSum(((1, (1, 0)), (0, (0, 1))))
    assert mix(cube, s) == (1, 0)


# -- properties

small = st.integers(0, 4)


@st.composite
def boxes(draw, dom=SQ):
    ivs = []
    for _ in range(dom.dim):
        lo, hi = sorted((draw(small), draw(small)))
        ivs.append((lo, hi))
    return Box(dom, ivs)


def _meets_oracle(a, b):
    def inside(x, y):
        return all(v.lo <= u.lo and u.hi <= v.hi for u, v in zip(x.intervals, y.intervals))
    if inside(a, b) or inside(b, a):
        return True
    for u, v in zip(a.intervals, b.intervals):
        # relative interiors on one axis: open interval, or the single point
        if u.lo < u.hi and v.lo < v.hi:
            ok = max(u.lo, v.lo) < min(u.hi, v.hi)
        elif u.lo < u.hi:
            ok = u.lo < v.lo < u.hi
        elif v.lo < v.hi:
            ok = v.lo < u.lo < v.hi
        else:
            ok = u.lo == v.lo
        if not ok:
            return False
    return True


@settings(max_examples=200, deadline=None)
@given(boxes(), boxes())
def test_meets_matches_interval_oracle(a, b):
    want = _meets_oracle(a, b)
    assert meets(a, b) == want == meets(b, a)
    # the LP path on vertex descriptions agrees with the closed form
    pa, pb = Polytope(SQ, a.extreme_points()), Polytope(SQ, b.extreme_points())
    assert meets(pa, pb) == want


@settings(max_examples=100, deadline=None)
@given(boxes(), boxes())
def test_subset_implies_meets_and_reflexive(a, b):
    assert meets(a, a)
    if subset(a, b):
        assert meets(a, b)


@settings(max_examples=100, deadline=None)
@given(boxes(), boxes())
def test_box_intersection_is_coordinatewise(a, b):
    assume(meets(a, b))
    got = intersect(a, b)
    for x in itertools.product(range(5), repeat=2):
        assert member(got, x) == (member(a, x) and member(b, x))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(small, small), min_size=1, max_size=6), st.tuples(small, small))
def test_polytope_membership_against_hull_of_box(points, probe):
    p = Polytope(SQ, points)
    c = p.canonical()
    assert c == p and set(c.vertices) <= set(p.vertices)
    assert member(c, probe) == member(p, probe)
    lo = [min(v[i] for v in points) for i in range(2)]
    hi = [max(v[i] for v in points) for i in range(2)]
    if member(p, probe):
        assert all(lo[i] <= probe[i] <= hi[i] for i in range(2))


weights = st.lists(st.integers(0, 6), min_size=1, max_size=4).filter(any)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(weights, st.lists(st.integers(0, 8), min_size=4, max_size=4)),
                min_size=1, max_size=3),
       st.lists(st.integers(1, 5), min_size=3, max_size=3))
def test_flattening_on_the_line(inners, outer_raw):
    sums = []
    for ws, xs in inners:
        total = sum(ws)
        sums.append(FormalConvexSum(tuple((F(w, total), F(x, 8)) for w, x in zip(ws, xs))))
    outer_raw = outer_raw[:len(sums)]
    total = sum(outer_raw)
    nested = FormalConvexSum(tuple((F(w, total), s) for w, s in zip(outer_raw, sums)))
    assert flatten_check(LINE, nested)


def test_full_set():
    assert full_set(SQ) == Box(SQ, [(0, 4), (0, 4)])
    cube = LatticeDomain.tuplemax("c", 2)
    assert full_set(cube).members == set(cube.elements)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(small, small), min_size=1, max_size=5),
       st.lists(st.tuples(small, small), min_size=1, max_size=5))
def test_polygon_intersection_against_grid(pa, pb):
    a, b = Polytope(SQ, pa), Polytope(SQ, pb)
    assume(meets(a, b))
    got = intersect(a, b)
    assert subset(got, a) and subset(got, b)
    grid = [(F(i, 2), F(j, 2)) for i in range(9) for j in range(9)]
    for x in grid:
        assert member(got, x) == (member(a, x) and member(b, x))
