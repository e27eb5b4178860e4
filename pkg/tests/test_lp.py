import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convexsem.errors import MalformedInput
from convexsem.lp import (INFEASIBLE, OPTIMAL, UNBOUNDED, Constraint, LinearProgram,
                          lp_feasible)


def test_textbook_maximum():
    lp = LinearProgram()
    x, y = lp.vars(2, nonneg=True)
    lp.add({x: 1, y: 2}, "<=", 4)
    lp.add({x: 3, y: 1}, "<=", 6)
    sol = lp.maximize({x: 1, y: 1})
    assert sol.status == OPTIMAL
    assert sol.values == [F(8, 5), F(6, 5)]
    assert sol.objective == F(14, 5)


def test_unbounded_and_infeasible():
    lp = LinearProgram()
    x = lp.var()
    lp.add({x: 1}, ">=", 3)
    assert lp.maximize({x: 1}).status == UNBOUNDED
    lp.add({x: 1}, "<=", 2)
    sol = lp.maximize({x: 1})
    assert sol.status == INFEASIBLE and not sol.feasible


def test_free_variables_go_negative():
    lp = LinearProgram()
    x = lp.var()
    lp.add({x: 1}, ">=", -7)
    assert lp.maximize({x: -1}).values == [F(-7)]


def test_equalities_and_redundant_rows():
    lp = LinearProgram()
    x, y = lp.vars(2)
    lp.add({x: 1, y: 1}, "==", 1)
    lp.add({x: 2, y: 2}, "==", 2)
    lp.add({x: 1}, "==", F(1, 3))
    sol = lp.maximize({y: 1})
    assert sol.values == [F(1, 3), F(2, 3)]


def test_rejects_bad_sense():
    lp = LinearProgram()
    x = lp.var()
    with pytest.raises(MalformedInput):
        lp.add({x: 1}, "<", 1)


def test_feasibility_with_slack():
    c = [Constraint((1,), ">=", F(0)), Constraint((1,), "<=", F(1))]
    res = lp_feasible(c)
    assert res.feasible and res.strictly_feasible and res.witness == [F(1, 2)]


def test_tight_strict_system_is_only_weakly_feasible():
    c = [Constraint((1,), ">=", F(1, 2), strict=True), Constraint((1,), "<=", F(1, 2), strict=True)]
    res = lp_feasible(c)
    assert res.feasible and not res.strictly_feasible


def test_infeasible_system_has_no_witness():
    res = lp_feasible([Constraint((1,), ">=", F(2)), Constraint((1,), "<=", F(1))])
    assert not res.feasible and res.witness is None


def _vertex_oracle(rows, bound):
    """Best objective over a 2D polygon by enumerating boundary crossings."""
    lines = [((a, b), c) for a, b, c in rows]
    lines += [((1, 0), bound), ((-1, 0), bound), ((0, 1), bound), ((0, -1), bound)]
    pts = []
    for ((a1, b1), c1), ((a2, b2), c2) in itertools.combinations(lines, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        x = F(c1 * b2 - c2 * b1, det)
        y = F(a1 * c2 - a2 * c1, det)
        if all(a * x + b * y <= c for (a, b), c in lines):
            pts.append((x, y))
    return pts


coef = st.integers(-5, 5)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(coef, coef, st.integers(-10, 10)), max_size=5), coef, coef)
def test_matches_vertex_enumeration(rows, ox, oy):
    bound = 10
    lp = LinearProgram()
    x, y = lp.vars(2)
    for a, b, c in rows:
        lp.add({x: a, y: b}, "<=", c)
    for v in (x, y):
        lp.add({v: 1}, "<=", bound)
        lp.add({v: 1}, ">=", -bound)
    sol = lp.maximize({x: ox, y: oy})
    pts = _vertex_oracle(rows, bound)
    if not pts:
        assert sol.status == INFEASIBLE
        return
    assert sol.status == OPTIMAL
    assert sol.objective == max(ox * px + oy * py for px, py in pts)
    sx, sy = sol.values
    assert all(a * sx + b * sy <= c for a, b, c in rows)
