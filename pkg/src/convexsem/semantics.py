"""From pregroup reductions to meanings in conceptual spaces.

Each base type is interpreted as a :class:`~convexsem.relations.Space`
(adjoints map to the same space), every word is a state on the
interpretation of its type, and a link diagram becomes a
:class:`~convexsem.relations.WirePlan` contracting the tensor of the word
states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce as _fold
from typing import Iterable, Sequence

from . import pregroup
from .convex import (Box, ContinuousDomain, ConvexSet, Interval, LatticeDomain, LatticeSet,
                     full_set, hull, intersect)
from .errors import (DomainMismatch, NoReduction, SpaceMismatch, UnknownBase, UnknownWord,
                     ValidationError)
from .pregroup import LinkDiagram, SimpleType, parse_type_string
from .relations import (UNIT, Cell, Relation, Space, WirePlan, apply_wire_plan, tensor)

NOUN_TYPE = parse_type_string("n")
ADJ_TYPE = parse_type_string("n n.l")
SUBJECT_RELATIVE_TYPE = parse_type_string("n.r n s.l n")


@dataclass(frozen=True)
class TypeInterpretation:
    spaces: dict

    def __call__(self, ts: Iterable[SimpleType]) -> Space:
        return interpret_type(self, ts)

    def space_of(self, t: SimpleType) -> Space:
        try:
            return self.spaces[t.base]
        except KeyError:
            raise UnknownBase(f"no space interprets base type {t.base!r}") from None


def interpret_type(ti: TypeInterpretation, ts: Iterable[SimpleType]) -> Space:
    spaces = [ti.space_of(t) for t in ts]
    if not spaces:
        return UNIT
    if len(spaces) == 1:
        return spaces[0]
    return Space(_fold(lambda a, b: a + b, (s.factors for s in spaces)),
                 name="⊗".join(str(s) for s in spaces))


@dataclass(frozen=True)
class LexicalEntry:
    word: str
    type: tuple
    meaning: Relation
    kind: str = "noun"
    relative_pronoun: bool = False


@dataclass
class Lexicon:
    """Domains, spaces, named properties and word entries.

    Base type ``b`` is interpreted by the space named ``b.upper()`` (or
    ``b`` itself), so ``n`` goes to ``N`` and ``s`` to ``S``.
    """

    domains: dict = field(default_factory=dict)
    spaces: dict = field(default_factory=dict)
    properties: dict = field(default_factory=dict)
    entries: dict = field(default_factory=dict)

    @property
    def interpretation(self) -> TypeInterpretation:
        out = {}
        for name, sp in self.spaces.items():
            out.setdefault(name.lower(), sp)
        for name, sp in self.spaces.items():
            out[name] = sp
        return TypeInterpretation(out)

    def space(self, base: str) -> Space:
        return self.interpretation.space_of(SimpleType(base))

    def lookup(self, word: str) -> LexicalEntry:
        """Find an entry, folding case and simple plural/3rd-person ``-s``/``-es``."""
        w = word.lower()
        for cand in (word, w, w[:-1] if w.endswith("s") else None, w[:-2] if w.endswith("es") else None):
            if cand and cand in self.entries:
                return self.entries[cand]
        raise UnknownWord(f"{word!r} is not in the lexicon")

    entry = lookup

    def add(self, entry: LexicalEntry) -> None:
        if entry.word in self.entries:
            raise ValidationError(f"duplicate entry {entry.word!r}")
        self.entries[entry.word] = entry

    def validate(self) -> None:
        ti = self.interpretation
        for e in self.entries.values():
            try:
                want = ti(e.type)
            except UnknownBase as exc:
                raise ValidationError(f"entry {e.word!r}: {exc}") from None
            if not e.meaning.is_state:
                raise ValidationError(f"entry {e.word!r}: meaning is not a state")
            if e.meaning.target != want:
                raise ValidationError(
                    f"entry {e.word!r}: meaning lives on {e.meaning.target}, type "
                    f"{pregroup.fmt_type(e.type)} interprets to {want}")


# --------------------------------------------------------------------------
# building meanings


def lift_property(prop: ConvexSet, space: Space) -> Relation:
    """Single-cell state: ``prop`` on its own domain, everything elsewhere."""
    hits = [i for i, d in enumerate(space.factors) if d == prop.domain]
    if not hits:
        raise DomainMismatch(f"domain {prop.domain.name!r} does not occur in {space}")
    if len(hits) > 1:
        raise DomainMismatch(f"domain {prop.domain.name!r} occurs more than once in {space}")
    comps = [prop if i == hits[0] else full_set(d) for i, d in enumerate(space.factors)]
    return Relation.state(space, [Cell(comps)])


def intersective_adjective(noun: Relation) -> Relation:
    """The diagonal of the noun's space restricted to the noun's region."""
    if not noun.is_state:
        raise SpaceMismatch("intersective adjectives are built from noun states")
    cells = [Cell(c.components * 2, c.classes + c.classes) for c in noun.cells]
    return Relation(noun.target, noun.target, cells)


def relative_pronoun(n_space: Space, s_space: Space) -> Relation:
    """Subject relative pronoun on N ⊗ N ⊗ S ⊗ N.

    The three noun legs are joined by one Frobenius spider (copy then
    merge) and the sentence leg is deleted, so the state is
    ``{(x, x, s, x)}``.
    """
    k, m = len(n_space), len(s_space)
    comps = ([full_set(d) for d in n_space.factors] * 2
             + [full_set(d) for d in s_space.factors]
             + [full_set(d) for d in n_space.factors])
    classes = list(range(k)) * 2 + list(range(2 * k, 2 * k + m)) + list(range(k))
    space = Space(n_space.factors * 2 + s_space.factors + n_space.factors)
    return Relation.state(space, [Cell(comps, classes)])


def noun_hull(space: Space, nouns: Sequence[Relation]) -> Relation:
    """Factor-wise convex hull of single-cell noun states.

    This over-approximates the joint hull when the nouns differ in
    several factors at once.
    """
    comps = []
    for i, d in enumerate(space.factors):
        parts = []
        for n in nouns:
            if len(n.cells) != 1 or not n.cells[0].is_product:
                raise ValidationError("noun hulls take single product-cell nouns")
            parts.append(n.cells[0].components[i])
        comps.append(hull(d, parts))
    return Relation.state(space, [Cell(comps)])


# --------------------------------------------------------------------------
# evaluation


def _layout(words: Sequence[LexicalEntry], ti: TypeInterpretation):
    simples, offsets, widths = [], [], []
    off = 0
    for w in words:
        for t in w.type:
            sp = ti.space_of(t)
            simples.append((t, sp))
            offsets.append(off)
            widths.append(len(sp))
            off += len(sp)
    return simples, offsets, widths


def plan_from_diagram(words: Sequence[LexicalEntry], diagram: LinkDiagram,
                      ti: TypeInterpretation) -> WirePlan:
    """Expand simple-type links into per-factor contractions."""
    simples, offsets, widths = _layout(words, ti)
    pairs = []
    for i, j in diagram.links:
        if simples[i][1] != simples[j][1]:
            raise SpaceMismatch(f"link ({i},{j}) joins {simples[i][1]} with {simples[j][1]}")
        pairs.extend((offsets[i] + k, offsets[j] + k) for k in range(widths[i]))
    survivors = [offsets[s] + k for s in diagram.survivors for k in range(widths[s])]
    return WirePlan(tuple(pairs), tuple(survivors))


def tokenize(phrase) -> list[str]:
    if isinstance(phrase, str):
        return phrase.split()
    return list(phrase)


@dataclass
class Evaluation:
    words: list
    diagram: LinkDiagram
    plan: WirePlan
    meaning: Relation


def evaluate_all(lexicon: Lexicon, phrase, target="s", cap: int | None = None) -> list[Evaluation]:
    """Evaluate a phrase under every reduction found (up to ``cap``)."""
    if isinstance(target, str):
        target = parse_type_string(target)
    words = [lexicon.lookup(w) for w in tokenize(phrase)]
    ts = tuple(t for w in words for t in w.type)
    diagrams = pregroup.reduce(ts, target, cap)
    if not diagrams:
        raise NoReduction(f"{pregroup.fmt_type(ts)} does not reduce to {pregroup.fmt_type(target)}")
    ti = lexicon.interpretation
    state = _fold(tensor, [w.meaning for w in words]) if words else Relation.state(UNIT, [Cell(())])
    out_space = ti(target)
    results = []
    for d in diagrams:
        plan = plan_from_diagram(words, d, ti)
        meaning = apply_wire_plan(plan, state)
        results.append(Evaluation(words, d, plan, Relation(UNIT, out_space, meaning.cells)))
    return results


def evaluate(lexicon: Lexicon, phrase, target="s") -> Relation:
    """Meaning of ``phrase`` under its first reduction to ``target``."""
    return evaluate_all(lexicon, phrase, target)[0].meaning


def entails(a: Relation, b: Relation) -> bool:
    """Every cell of ``a`` lies inside some cell of ``b``."""
    if a.target != b.target or a.source != b.source:
        raise SpaceMismatch(f"cannot compare {a.target} with {b.target}")
    return all(any(c.subsumed_by(d) for d in b.cells) for c in a.cells)


# --------------------------------------------------------------------------
# the food-and-drink lexicon

_H = Fraction(1, 2)


def _taste_property(domain: ContinuousDomain, k: int) -> Box:
    # distinguished dimension at least 1/2, all others at most 1/2
    return Box(domain, [Interval(_H, 1) if i == k else Interval(0, _H) for i in range(domain.dim)])


def _box(domain, *pairs) -> Box:
    return Box(domain, [Interval(Fraction(lo), Fraction(hi)) for lo, hi in pairs])


@lru_cache(maxsize=None)
def demo_lexicon() -> Lexicon:
    """Colour/taste/texture nouns, a two-bit sentence lattice, and a few words.

    Treat the returned object as read-only; it is shared between callers.
    """
    colour = ContinuousDomain("colour", [(0, 360), (0, 1), (0, 1)])
    taste = ContinuousDomain("taste", [(0, 1)] * 5)
    texture = ContinuousDomain("texture", [(0, 1)])
    sentence = LatticeDomain.tuplemax("sentence", 2)
    food = LatticeDomain.from_tree("food", ("food", ("fruit", "apples", "bananas"), "beer"))
    N = Space((colour, taste, texture), name="N")
    S = Space((sentence,), name="S")

    lex = Lexicon(
        domains={d.name: d for d in (colour, taste, texture, sentence, food)},
        spaces={"N": N, "S": S},
    )
    props = lex.properties
    props["yellow"] = _box(colour, (45, 75), ("1/2", 1), (0, 1))
    props["green"] = _box(colour, (75, 135), ("1/2", 1), (0, 1))
    props["brown"] = _box(colour, (0, 45), ("4/5", 1), ("1/5", "2/5"))
    props["sweet"] = _taste_property(taste, 0)
    props["sour"] = _taste_property(taste, 1)
    props["bitter"] = _taste_property(taste, 2)
    for name, prop in props.items():
        prop.label = name
    sweet, sour, bitter = props["sweet"], props["sour"], props["bitter"]

    def noun(word, *comps):
        lex.add(LexicalEntry(word, NOUN_TYPE, Relation.state(N, [Cell(comps)]), "noun"))

    noun("banana", _box(colour, (60, 95), ("3/4", 1), ("1/4", 1)),
         hull(taste, [sweet, bitter]), _box(texture, ("1/5", "1/2")))
    noun("apple", _box(colour, (0, 105), ("3/4", 1), ("1/2", 1)),
         hull(taste, [sweet, sour]), _box(texture, ("1/2", "4/5")))
    noun("beer", _box(colour, (40, 50), ("17/20", 1), ("1/10", "7/10")),
         hull(taste, [sweet, sour, bitter]), _box(texture, (0, "1/100")))
    banana, apple = lex.entries["banana"].meaning, lex.entries["apple"].meaning
    lex.add(LexicalEntry("fruit", NOUN_TYPE, noun_hull(N, [banana, apple]), "noun"))
    for name in ("sweet", "sour", "bitter"):
        lex.add(LexicalEntry(name, NOUN_TYPE, lift_property(props[name], N), "noun"))

    for name in ("yellow", "green", "brown"):
        adj = intersective_adjective(lift_property(props[name], N))
        lex.add(LexicalEntry(name, ADJ_TYPE, adj.as_state(), "adj"))

    # soft depends on the noun: bananas up to texture 0.35, apples up to 0.6
    soft_region = Relation.state(N, [
        _restrict_texture(banana.cells[0], Fraction(7, 20)),
        _restrict_texture(apple.cells[0], Fraction(3, 5)),
    ])
    lex.add(LexicalEntry("soft", ADJ_TYPE, intersective_adjective(soft_region).as_state(), "adj"))

    green_banana = evaluate(lex, "green banana", "n").cells[0]
    yellow_banana = evaluate(lex, "yellow banana", "n").cells[0]
    beer = lex.entries["beer"].meaning.cells[0]
    lifted_sweet = lex.entries["sweet"].meaning.cells[0]
    lifted_bitter = lex.entries["bitter"].meaning.cells[0]

    def point(v):
        return Cell([LatticeSet(sentence, [v])])

    taste_space = Space(N.factors + S.factors + N.factors, name="N⊗S⊗N")
    lex.add(LexicalEntry("taste", parse_type_string("n.r s n.l"), Relation.state(taste_space, [
        green_banana + point((0, 0)) + lifted_bitter,
        green_banana + point((1, 1)) + lifted_sweet,
        yellow_banana + point((1, 0)) + lifted_sweet,
        beer + point((0, 1)) + lifted_sweet,
        beer + point((1, 0)) + lifted_bitter,
    ]), "verb"))
    lex.add(LexicalEntry("which", SUBJECT_RELATIVE_TYPE, relative_pronoun(N, S),
                         "pronoun", relative_pronoun=True))
    lex.validate()
    return lex


def _restrict_texture(cell: Cell, upper: Fraction) -> Cell:
    tex = cell.components[2]
    cap = Box(tex.domain, [Interval(0, upper)])
    return Cell(cell.components[:2] + (intersect(tex, cap),))
