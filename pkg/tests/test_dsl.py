import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convexsem.convex import Box, ContinuousDomain, LatticeDomain, LatticeSet, full_set, hull
from convexsem.dsl import (demo_lexicon_text, format_lexicon, load_lexicon, parse_lexicon,
                           tokenize)
from convexsem.errors import ParseError, ValidationError
from convexsem.pregroup import parse_type_string
from convexsem.relations import Cell, Relation, Space
from convexsem.semantics import (ADJ_TYPE, NOUN_TYPE, LexicalEntry, Lexicon, evaluate,
                                 intersective_adjective)

HEADER = """\
domain hue continuous 1 [0,10]
domain shape continuous 2 [0,4] [0,4]
domain mood lattice tuplemax 2
space N = hue * shape
space S = mood
"""


def test_empty_file_is_an_empty_valid_lexicon(tmp_path):
    p = tmp_path / "empty.lex"
    p.write_text("")
    assert load_lexicon(p) == Lexicon()
    assert parse_lexicon("# only a comment\n\n") == Lexicon()


def test_shipped_file_loads():
    lex = load_lexicon("demo")
    assert set(lex.entries) >= {"banana", "apple", "beer", "fruit", "taste", "which", "soft"}
    assert "soft" in demo_lexicon_text()


def test_tokens_track_lines_and_brackets():
    toks = tokenize("a [1,\n 2]\nb")
    kinds = [t.kind for t in toks]
    assert kinds.count("nl") == 2  # the newline inside brackets is dropped
    assert toks[-2].line == 3


@pytest.mark.parametrize("text,line,col", [
    (HEADER + "noun x = [0,1 * full\n", 6, 10),
    (HEADER + "nuon x = full * full\n", 6, 1),
    ("domain d continuous 1 [0,1]\nproperty p on d box [0,1]x[0,1]\n", 2, 26),
])
def test_syntax_errors_are_positioned(text, line, col):
    with pytest.raises(ParseError) as err:
        parse_lexicon(text)
    assert (err.value.line, err.value.column) == (line, col)


def test_join_closure_violation_names_the_entry():
    text = HEADER + "noun x = full * full\nverb v type n.r s n.l cells { x x {(1,0),(0,1)} x x }\n"
    with pytest.raises(ValidationError, match="verb"):
        parse_lexicon(text)


def test_unknown_names_and_duplicates():
    with pytest.raises(ParseError):
        parse_lexicon("space N = nope\n")
    with pytest.raises(ValidationError):
        parse_lexicon(HEADER + "noun x = full * full\nnoun x = full * full\n")
    with pytest.raises(ValidationError):
        parse_lexicon(HEADER + "property p on hue box [0,11]\n")


def test_states_unions_intersections_and_phrases():
    text = HEADER + """\
property red on hue box [0,3]
property round on shape hull (0,0) (4,0) (0,4)
noun ball = red * round
noun thing = [0,10] * [0,2]x[0,2] | [5,10] * full
adj small diag full * [0,1]x[0,1]
adj reddish cells { (full * full) -> (red * full) ; diag(ball & full * [0,1]x[0,4]) }
verb likes type n.r s n.l cells {
    "small ball" x {(1,1)} x thing ;
    ball x {(0,0)} x red
}
"""
    lex = parse_lexicon(text)
    ball = lex.entries["ball"].meaning
    assert len(lex.entries["thing"].meaning.cells) == 2
    small_ball = evaluate(lex, "small ball", "n")
    assert lex.entries["likes"].meaning.cells[0].components[:2] == small_ball.cells[0].components
    assert str(lex.properties["round"]) == "round"
    # the tied and untied adjective cells print back as written
    again = parse_lexicon(format_lexicon(lex))
    assert again == lex
    assert "diag(" in format_lexicon(lex) and "->" in format_lexicon(lex)
    assert ball.cells[0].components[0].structurally_equal(Box(lex.domains["hue"], [(0, 3)]))


def test_continuation_lines():
    lex = parse_lexicon(HEADER + "noun a = [0,1]\n  * full\n  | [2,3] * full\n")
    assert len(lex.entries["a"].meaning.cells) == 2


def test_tree_lattice_round_trip():
    text = ("domain food lattice tree (food (fruit apples bananas) beer)\n"
            "space N = food\nnoun f = {apples,bananas,fruit}\n")
    lex = parse_lexicon(text)
    assert lex.domains["food"].join("apples", "beer") == "food"
    assert parse_lexicon(format_lexicon(lex)) == lex


# -- random lexicons survive print then parse


def _rand_box(rng, dom):
    ivs = []
    for b in dom.bounds:
        lo, hi = sorted(F(rng.randint(int(b.lo) * 4, int(b.hi) * 4), 4) for _ in range(2))
        ivs.append((lo, hi))
    return Box(dom, ivs)


def _random_lexicon(seed: int) -> Lexicon:
    rng = random.Random(seed)
    doms = [ContinuousDomain(f"d{i}", [(0, rng.randint(1, 5)) for _ in range(rng.randint(1, 2))])
            for i in range(rng.randint(1, 2))]
    mood = LatticeDomain.tuplemax("mood", rng.randint(1, 2))
    N, S = Space(doms, name="N"), Space((mood,), name="S")
    lex = Lexicon(domains={d.name: d for d in doms + [mood]}, spaces={"N": N, "S": S})
    for k in range(rng.randint(0, 3)):
        d = rng.choice(doms)
        lex.properties[f"p{k}"] = _rand_box(rng, d).labelled(f"p{k}")

    def part(d):
        roll = rng.random()
        if roll < 0.2:
            return full_set(d)
        if roll < 0.4:
            return hull(d, [_rand_box(rng, d), _rand_box(rng, d)])
        own = [p for p in lex.properties.values() if p.domain == d]
        if roll < 0.6 and own:
            return rng.choice(own)
        return _rand_box(rng, d)

    def region():
        return Cell([part(d) for d in doms])

    for k in range(rng.randint(1, 3)):
        cells = [region() for _ in range(rng.randint(1, 2))]
        lex.add(LexicalEntry(f"w{k}", NOUN_TYPE, Relation.state(N, cells), "noun"))
    adj = intersective_adjective(Relation.state(N, [region()]))
    lex.add(LexicalEntry("a", ADJ_TYPE, adj.as_state(), "adj"))
    pts = [e for e in mood.elements]
    verb_cells = [region() + Cell([LatticeSet(mood, [rng.choice(pts)])]) + region()
                  for _ in range(rng.randint(1, 3))]
    ts = parse_type_string("n.r s n.l")
    lex.add(LexicalEntry("v", ts, Relation.state(Space(N.factors + S.factors + N.factors),
                                                 verb_cells), "verb"))
    lex.validate()
    return lex


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_print_parse_round_trip(seed):
    lex = _random_lexicon(seed)
    text = format_lexicon(lex)
    back = parse_lexicon(text)
    assert back == lex
    assert format_lexicon(back) == text
