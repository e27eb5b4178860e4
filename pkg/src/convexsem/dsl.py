"""Reader and writer for the line-oriented lexicon language.

One declaration per line, ``#`` starts a comment.  A newline inside
``{...}``, ``(...)`` or ``[...]`` does not end the statement, and neither
does one followed by ``*``, ``|`` or ``&``::

    domain colour continuous 3 [0,360] [0,1] [0,1]
    domain sentence lattice tuplemax 2
    domain food lattice tree (food (fruit apples bananas) beer)
    space N = colour * taste * texture
    property yellow on colour box [45,75]x[0.5,1]x[0,1]
    property tangy on taste hull sweet sour
    noun banana = [60,95]x[0.75,1]x[0.25,1] * hull(sweet,bitter) * [0.2,0.5]
    adj yellow diag yellow
    adj soft diag { banana & full * full * [0,0.35] ; <state> }
    adj odd cells { (<state>) -> (<state>) ; diag(<state>) }
    verb taste type n.r s n.l cells { "green banana" x {(0,0)} x bitter ; ... }
    pronoun which subjectrel

A state is a ``*``-product with one set per atomic factor, a noun
name, a property name (lifted to the whole space), or a quoted phrase
that is evaluated with the entries declared so far.  Nouns may be unions
of states joined by ``|``; ``&`` intersects states cell by cell.  Base
type ``b`` is interpreted by the space named ``B`` (upper-cased) or ``b``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .convex import (Box, ContinuousDomain, ConvexSet, Interval, LatticeDomain, LatticeSet,
                     Polytope, fmt_point, full_set, hull, intersect)
from .errors import ConvexSemError, EmptyIntersection, ParseError, ValidationError
from .pregroup import SimpleType, fmt_type, parse_type_string
from .relations import Cell, Relation, Space
from .semantics import (ADJ_TYPE, NOUN_TYPE, SUBJECT_RELATIVE_TYPE, LexicalEntry, Lexicon,
                        evaluate, intersective_adjective, lift_property, relative_pronoun)

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<num>-?\d+(?:\.\d+)?(?:/\d+)?(?![A-Za-z_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<punct>[\[\](){},;*=|&])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out, opened = [], []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            if not opened:
                out.append(Token("nl", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "punct":
            ch = m.group()
            tok = Token(ch, ch, line, col)
            if ch in "[({":
                opened.append(tok)
            elif ch in "])}" and opened:
                opened.pop()
            out.append(tok)
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, col))
        pos = m.end()
    if opened:
        t = opened[-1]
        raise ParseError(f"unclosed {t.text!r}", t.line, t.col)
    out.append(Token("nl", "\n", line, pos - line_start + 1))
    out.append(Token("eof", "", line, pos - line_start + 1))
    # a line opening with an operator continues the previous statement
    return [t for k, t in enumerate(out)
            if not (t.kind == "nl" and out[k + 1].kind in ("*", "|", "&"))]


def _num(tok: Token) -> Fraction:
    return Fraction(tok.text)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.lex = Lexicon()
        self.stmt_start: Token | None = None

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def at(self, kind, text=None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def accept(self, kind, text=None):
        if self.at(kind, text):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, kind, text=None) -> Token:
        t = self.accept(kind, text)
        if t is None:
            want = text or kind
            got = self.tok.text if self.tok.kind != "nl" else "end of line"
            raise self.error(f"expected {want!r}, got {got!r}")
        return t

    def keyword(self, *words) -> str:
        t = self.tok
        if t.kind == "name" and t.text in words:
            self.i += 1
            return t.text
        raise self.error(f"expected one of {', '.join(words)}")

    # -- top level
    def parse(self) -> Lexicon:
        while not self.at("eof"):
            if self.accept("nl"):
                continue
            self.stmt_start = self.tok
            head = self.keyword("domain", "space", "property", "noun", "adj", "verb", "pronoun")
            try:
                getattr(self, f"stmt_{head}")()
            except ParseError:
                raise
            except ConvexSemError as exc:
                raise ValidationError(
                    f"line {self.stmt_start.line}: {head} declaration: {exc}") from None
            if not self.at("nl"):
                raise self.error(f"unexpected {self.tok.text!r} after {head} declaration")
        self.lex.validate()
        return self.lex

    def _fresh(self, table: dict, name_tok: Token, what: str) -> str:
        if name_tok.text in table:
            raise ValidationError(f"line {name_tok.line}: duplicate {what} {name_tok.text!r}")
        return name_tok.text

    def stmt_domain(self):
        name = self._fresh(self.lex.domains, self.expect("name"), "domain")
        kind = self.keyword("continuous", "lattice")
        if kind == "continuous":
            dim = int(self.expect("num").text)
            bounds = [self.interval() for _ in range(dim)]
            dom = ContinuousDomain(name, bounds)
        elif self.keyword("tree", "tuplemax") == "tuplemax":
            dom = LatticeDomain.tuplemax(name, int(self.expect("num").text))
        else:
            dom = LatticeDomain.from_tree(name, self.tree())
        self.lex.domains[name] = dom

    def tree(self):
        if self.accept("("):
            label = self.expect("name").text
            kids = []
            while not self.accept(")"):
                kids.append(self.tree())
            return (label, *kids) if kids else label
        return self.expect("name").text

    def stmt_space(self):
        name = self._fresh(self.lex.spaces, self.expect("name"), "space")
        self.expect("=")
        factors = [self.domain_ref()]
        while self.accept("*"):
            factors.append(self.domain_ref())
        self.lex.spaces[name] = Space(factors, name=name)

    def domain_ref(self):
        t = self.expect("name")
        if t.text not in self.lex.domains:
            raise self.error(f"unknown domain {t.text!r}", t)
        return self.lex.domains[t.text]

    def stmt_property(self):
        name = self._fresh(self.lex.properties, self.expect("name"), "property")
        self.keyword("on")
        dom = self.domain_ref()
        how = self.keyword("box", "hull", "set")
        if how == "box":
            prop = self.box(dom)
        elif how == "set":
            prop = self.lattice_set(dom)
        else:
            parts = [self.hull_arg(dom)]
            while not self.at("nl"):
                self.accept(",")
                parts.append(self.hull_arg(dom))
            prop = hull(dom, parts)
        prop = prop.labelled(name)
        self.lex.properties[name] = prop

    # -- sets
    def interval(self) -> Interval:
        self.expect("[")
        lo = _num(self.expect("num"))
        self.expect(",")
        hi = _num(self.expect("num"))
        self.expect("]")
        return Interval(lo, hi)

    def box(self, dom) -> Box:
        if not isinstance(dom, ContinuousDomain):
            raise self.error(f"box literal on lattice domain {dom.name!r}")
        ivs = [self.interval()]
        for _ in range(dom.dim - 1):
            self.expect("name", "x")
            ivs.append(self.interval())
        return Box(dom, ivs)

    def point(self):
        self.expect("(")
        coords = [_num(self.expect("num"))]
        while self.accept(","):
            coords.append(_num(self.expect("num")))
        self.expect(")")
        return tuple(coords)

    def element(self, dom: LatticeDomain):
        if self.at("("):
            p = self.point()
            return tuple(int(c) if c.denominator == 1 else c for c in p)
        return self.expect("name").text

    def lattice_set(self, dom) -> LatticeSet:
        if not isinstance(dom, LatticeDomain):
            raise self.error(f"set literal on continuous domain {dom.name!r}")
        self.expect("{")
        items = [self.element(dom)]
        while self.accept(","):
            items.append(self.element(dom))
        self.expect("}")
        return LatticeSet(dom, items)

    def named_property(self, dom) -> ConvexSet:
        t = self.expect("name")
        prop = self.lex.properties.get(t.text)
        if prop is None:
            raise self.error(f"unknown property {t.text!r}", t)
        if prop.domain != dom:
            raise ValidationError(f"line {t.line}: property {t.text!r} is on "
                                  f"{prop.domain.name!r}, expected {dom.name!r}")
        return prop

    def hull_arg(self, dom) -> ConvexSet:
        if self.at("["):
            return self.box(dom)
        if self.at("("):
            return Polytope(dom, [self.point()])
        if self.at("{"):
            return self.lattice_set(dom)
        return self.named_property(dom)

    def set_expr(self, dom) -> ConvexSet:
        if self.at("["):
            return self.box(dom)
        if self.at("{"):
            return self.lattice_set(dom)
        if self.accept("name", "full"):
            return full_set(dom)
        if self.at("name", "hull") and self.peek().kind == "(":
            self.i += 2
            parts = [self.hull_arg(dom)]
            while self.accept(","):
                parts.append(self.hull_arg(dom))
            self.expect(")")
            return hull(dom, parts)
        return self.named_property(dom)

    # -- states
    def state(self, space: Space) -> list[Cell]:
        t = self.tok
        if t.kind == "string":
            self.i += 1
            return self.phrase(t, space)
        if t.kind == "name" and self.peek().kind != "*" and t.text not in ("full", "hull"):
            entry = self.lex.entries.get(t.text)
            if entry is not None and entry.meaning.target == space:
                self.i += 1
                return list(entry.meaning.cells)
            prop = self.lex.properties.get(t.text)
            if prop is not None and len(space) > 1:
                self.i += 1
                return list(lift_property(prop, space).cells)
        comps = [self.set_expr(space.factors[0])]
        for dom in space.factors[1:]:
            self.expect("*")
            comps.append(self.set_expr(dom))
        return [Cell(comps)]

    def phrase(self, tok: Token, space: Space) -> list[Cell]:
        text = tok.text[1:-1]
        ti = self.lex.interpretation
        bases = [b for b, sp in ti.spaces.items() if sp == space and b.islower()]
        if not bases:
            raise ValidationError(f"line {tok.line}: no base type interprets {space}")
        return list(evaluate(self.lex, text, bases[0]).cells)

    def conj(self, space: Space) -> list[Cell]:
        cells = self.state(space)
        while self.accept("&"):
            other = self.state(space)
            cells = [c for a in cells for b in other if (c := _meet_cells(a, b)) is not None]
            if not cells:
                raise ValidationError(f"line {self.tok.line}: intersection is empty")
        return cells

    def union(self, space: Space) -> list[Cell]:
        cells = self.conj(space)
        while self.accept("|"):
            cells += self.conj(space)
        return cells

    def _word(self) -> str:
        return self._fresh(self.lex.entries, self.expect("name"), "entry")

    def stmt_noun(self):
        word = self._word()
        self.expect("=")
        N = self.lex.space("n")
        self.lex.add(LexicalEntry(word, NOUN_TYPE, Relation.state(N, self.union(N)), "noun"))

    def _items(self, item):
        out = []
        if self.accept("{"):
            out.extend(item())
            while self.accept(";"):
                if self.at("}"):
                    break
                out.extend(item())
            self.expect("}")
        else:
            out.extend(item())
        return out

    def stmt_adj(self):
        word = self._word()
        N = self.lex.space("n")
        mode = self.keyword("diag", "cells")
        if mode == "diag":
            region = Relation.state(N, self._items(lambda: self.conj(N)))
            cells = intersective_adjective(region).cells
        else:
            if not self.at("{"):
                raise self.error("expected '{' after cells")
            cells = self._items(lambda: self.adj_cell(N))
        self.lex.add(LexicalEntry(word, ADJ_TYPE, Relation.state(N @ N, cells), "adj"))

    def adj_cell(self, N: Space) -> list[Cell]:
        if self.accept("name", "diag"):
            self.expect("(")
            region = Relation.state(N, self.conj(N))
            self.expect(")")
            return list(intersective_adjective(region).cells)
        self.expect("(")
        src = self.state(N)
        self.expect(")")
        self.expect("arrow")
        self.expect("(")
        tgt = self.state(N)
        self.expect(")")
        return [a + b for a in src for b in tgt]

    def stmt_verb(self):
        word = self._word()
        self.keyword("type")
        start = self.tok
        parts = []
        while self.at("name") and self.tok.text != "cells":
            parts.append(self.tok.text)
            self.i += 1
        if not parts:
            raise self.error("expected a type string")
        ts = parse_type_string(" ".join(parts))
        self.keyword("cells")
        ti = self.lex.interpretation
        spaces = [ti.space_of(t) for t in ts]
        if not self.at("{"):
            raise self.error("expected '{' after cells")

        def cell():
            acc = self.state(spaces[0])
            for sp in spaces[1:]:
                self.expect("name", "x")
                nxt = self.state(sp)
                acc = [a + b for a in acc for b in nxt]
            return acc

        cells = self._items(cell)
        self.lex.add(LexicalEntry(word, ts, Relation.state(ti(ts), cells), "verb"))

    def stmt_pronoun(self):
        word = self._word()
        self.keyword("subjectrel")
        N, S = self.lex.space("n"), self.lex.space("s")
        self.lex.add(LexicalEntry(word, SUBJECT_RELATIVE_TYPE, relative_pronoun(N, S),
                                  "pronoun", relative_pronoun=True))


def _meet_cells(a: Cell, b: Cell) -> Cell | None:
    if not (a.is_product and b.is_product):
        raise ValidationError("'&' only combines product cells")
    try:
        return Cell([intersect(x, y) for x, y in zip(a.components, b.components)])
    except EmptyIntersection:
        return None


def parse_lexicon(text: str) -> Lexicon:
    return _Parser(text).parse()


def load_lexicon(path) -> Lexicon:
    """Read and validate a lexicon file; the name ``demo`` selects the shipped one."""
    if str(path) == "demo":
        return parse_lexicon(demo_lexicon_text())
    return parse_lexicon(Path(path).read_text(encoding="utf-8"))


def demo_lexicon_text() -> str:
    return resources.files("convexsem").joinpath("data/demo.lex").read_text(encoding="utf-8")


# --------------------------------------------------------------------------
# printing


def format_set(s: ConvexSet, properties: dict | None = None) -> str:
    properties = properties or {}
    if isinstance(s, LatticeSet):
        if s.members == frozenset(s.domain.elements):
            return "full"
        return str(s)
    if isinstance(s, Box):
        if s.intervals == s.domain.bounds:
            return "full"
        return str(s)
    if s.label and _label_resolves(s, properties):
        return s.label
    return s.literal()


_LABEL_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _label_resolves(s: ConvexSet, properties: dict) -> bool:
    label = s.label
    if label.startswith("hull(") and label.endswith(")"):
        names = label[5:-1].split(",")
    else:
        names = [label]
    if not all(_LABEL_NAME.fullmatch(n) and n in properties for n in names):
        return False
    if properties[names[0]].domain != s.domain:
        return False
    if len(names) == 1:
        return properties[names[0]] == s
    return hull(s.domain, [properties[n] for n in names]) == s


def _format_product(cell: Cell, properties) -> str:
    if not cell.is_product:
        raise ValidationError(f"cell {cell} has ties and cannot be written as a product")
    return " * ".join(format_set(c, properties) for c in cell.components)


def _diag_region(cell: Cell, k: int) -> Cell | None:
    """If ``cell`` on N ⊗ N is a restricted diagonal, return its region."""
    head = cell.permute(range(k))
    if cell.classes != head.classes + head.classes:
        return None
    return head


def _format_domain(d) -> str:
    if isinstance(d, ContinuousDomain):
        return f"domain {d.name} continuous {d.dim} " + " ".join(str(b) for b in d.bounds)
    k = len(d.elements[0]) if isinstance(d.elements[0], tuple) else None
    if k is not None and d == LatticeDomain.tuplemax(d.name, k):
        return f"domain {d.name} lattice tuplemax {k}"
    tree = getattr(d, "_tree", None)
    if tree is None:
        raise ValidationError(f"lattice {d.name!r} has no printable tree form")

    def show(node):
        if isinstance(node, tuple):
            return "(" + " ".join([node[0]] + [show(c) for c in node[1:]]) + ")"
        return node

    text = show(tree)
    return f"domain {d.name} lattice tree {text if text.startswith('(') else '(' + text + ')'}"


def format_lexicon(lex: Lexicon) -> str:
    """Render a lexicon in the DSL; ``parse_lexicon`` reads it back equal."""
    props = lex.properties
    lines = [_format_domain(d) for d in lex.domains.values()]
    for name, sp in lex.spaces.items():
        lines.append(f"space {name} = " + " * ".join(d.name for d in sp.factors))
    for name, p in props.items():
        others = {k: v for k, v in props.items() if k != name}
        if isinstance(p, Box):
            body = f"box {p}"
        elif isinstance(p, LatticeSet):
            body = f"set {p}"
        elif p.label and p.label != name and _label_resolves(p, others):
            body = "hull " + " ".join(p.label[5:-1].split(","))
        else:
            body = "hull " + " ".join(fmt_point(v) for v in p.vertices)
        lines.append(f"property {name} on {p.domain.name} {body}")

    N = lex.space("n") if lex.entries else None
    for e in lex.entries.values():
        cells = e.meaning.cells
        if e.relative_pronoun:
            lines.append(f"pronoun {e.word} subjectrel")
        elif e.kind == "noun" and e.type == NOUN_TYPE:
            lines.append(f"noun {e.word} = " + " | ".join(_format_product(c, props) for c in cells))
        elif e.kind == "adj" and e.type == ADJ_TYPE:
            k = len(N)
            regions = [_diag_region(c, k) for c in cells]
            if cells and all(r is not None for r in regions):
                body = " ; ".join(_format_product(r, props) for r in regions)
                lines.append(f"adj {e.word} diag {{ {body} }}")
            else:
                items = []
                for c, r in zip(cells, regions):
                    if r is not None:
                        items.append(f"diag({_format_product(r, props)})")
                    else:
                        items.append(f"({_format_product(c.permute(range(k)), props)}) -> "
                                     f"({_format_product(c.permute(range(k, 2 * k)), props)})")
                lines.append(f"adj {e.word} cells {{ " + " ; ".join(items) + " }")
        else:
            ti = lex.interpretation
            widths = [len(ti.space_of(t)) for t in e.type]
            items = []
            for c in cells:
                parts, off = [], 0
                for w in widths:
                    parts.append(_format_product(c.permute(range(off, off + w)), props))
                    off += w
                if not c.is_product:
                    raise ValidationError(f"verb {e.word!r} has a tied cell")
                items.append(" x ".join(parts))
            lines.append(f"verb {e.word} type {fmt_type(e.type)} cells {{\n    "
                         + " ;\n    ".join(items) + "\n}")
    return "\n".join(lines) + "\n"
