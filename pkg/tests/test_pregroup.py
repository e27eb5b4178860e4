import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convexsem.errors import InputTooLarge, ParseError
from convexsem.pregroup import (LinkDiagram, SimpleType, brute_force_reduce, contracts, fmt_type,
                                parse_type_string, reduce, validate_diagram)

S = parse_type_string("s")
N = parse_type_string("n")


def test_parse_and_print():
    ts = parse_type_string("n n.r s n.l.l  n.l.r")
    assert ts == (SimpleType("n"), SimpleType("n", 1), SimpleType("s"), SimpleType("n", -2),
                  SimpleType("n"))
    assert fmt_type(ts) == "n n.r s n.l.l n"
    assert SimpleType("n").l.l == SimpleType("n", -2)


def test_parse_errors_carry_columns():
    with pytest.raises(ParseError) as err:
        parse_type_string("n n.x")
    assert err.value.column == 3
    with pytest.raises(ParseError):
        parse_type_string("n q", alphabet={"n", "s"})


def test_contraction_rule():
    n = SimpleType("n")
    assert contracts(n.l, n) and contracts(n, n.r)
    assert not contracts(n.r, n) and not contracts(n, SimpleType("s", 1))


def test_transitive_sentence():
    ds = reduce(parse_type_string("n n.r s n.l n"), S)
    assert ds == [LinkDiagram(((0, 1), (3, 4)), (2,))]


def test_relative_clause():
    ts = parse_type_string("n n.r n s.l n n.r s n.l n")
    ds = reduce(ts, N)
    assert ds == [LinkDiagram(((0, 1), (3, 6), (4, 5), (7, 8)), (2,))]


def test_enclosed_survivor_is_rejected():
    ts = parse_type_string("n s n.r")
    bad = LinkDiagram(((0, 2),), (1,))
    assert not validate_diagram(ts, bad, S)
    assert reduce(ts, S) == []


def test_crossing_links_are_rejected():
    ts = parse_type_string("n.l a.l n a")
    d = LinkDiagram.from_links(4, [(0, 2), (1, 3)])
    assert not validate_diagram(ts, d, ())


def test_cap_truncates_in_order(monkeypatch):
    ts = parse_type_string("n.l n n.l n")
    target = parse_type_string("n.l n")
    everything = reduce(ts, target, cap=100)
    assert [d.links for d in everything] == [((0, 1),), ((2, 3),)]
    assert reduce(ts, target, cap=1) == everything[:1]
    monkeypatch.setenv("CONVEXSEM_MAX_DIAGRAMS", "1")
    assert reduce(ts, target) == everything[:1]


def test_brute_force_limit():
    with pytest.raises(InputTooLarge):
        brute_force_reduce(parse_type_string(" ".join(["n"] * 11)), ())


simple = st.builds(SimpleType, st.sampled_from(["n", "s"]), st.integers(-2, 2))


@settings(max_examples=300, deadline=None)
@given(st.lists(simple, max_size=8), st.sampled_from([(), S, N, N + S]))
def test_reduce_equals_brute_force(ts, target):
    fast = reduce(ts, target, cap=10**6)
    assert fast == brute_force_reduce(ts, target)
    for d in fast:
        assert validate_diagram(ts, d, target)


@settings(max_examples=100, deadline=None)
@given(st.lists(simple, max_size=6))
def test_inserting_a_contractible_pair_keeps_grammaticality(ts):
    if not reduce(ts, (), cap=1):
        return
    for k in range(len(ts) + 1):
        t = SimpleType("n", 0)
        assert reduce(ts[:k] + [t, t.r] + ts[k:], (), cap=1)
