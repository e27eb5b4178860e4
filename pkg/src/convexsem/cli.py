"""``convexsem`` command line.

Exit codes: 0 success, 1 ungrammatical or empty meaning, 2 usage, IO or
validation error (one-line diagnostic on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from . import pregroup
from .convex import Box, LatticeDomain, LatticeSet, Polytope, fmt_point
from .dsl import load_lexicon
from .errors import ConvexSemError, NoReduction, ParseError
from .pregroup import LinkDiagram, fmt_type, parse_type_string
from .relations import Relation, convexity_audit
from .semantics import Lexicon, entails, evaluate_all

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# rendering


def _q(x) -> str:
    return str(Fraction(x))


def set_json(s) -> dict:
    if isinstance(s, Box):
        return {"kind": "box", "intervals": [[_q(iv.lo), _q(iv.hi)] for iv in s.intervals]}
    if isinstance(s, Polytope):
        out = {"kind": "hull", "vertices": [[_q(x) for x in v] for v in s.vertices]}
        if s.label:
            out["label"] = s.label
        return out
    return {"kind": "set", "members": [fmt_point(m) for m in s.sorted_members()]}


def _lattice_only(r: Relation) -> bool:
    return all(isinstance(d, LatticeDomain) for d in r.target.factors) and r.source.is_unit


def _points(r: Relation) -> list[str]:
    def key(p):
        return [d.index(x) for d, x in zip(r.target.factors, p)]
    pts = sorted(r.tuples(), key=key, reverse=True)
    return [fmt_point(p[0] if len(p) == 1 else p) for p in pts]


def state_text(r: Relation) -> str:
    if r.is_empty:
        return "∅"
    if _lattice_only(r):
        return "{" + ",".join(_points(r)) + "}"
    return str(r)


def state_json(r: Relation) -> dict:
    out = {
        "space": [d.name for d in r.space.factors],
        "empty": r.is_empty,
        "cells": [{"components": [set_json(c) for c in cell.components],
                   "ties": list(cell.classes)} for cell in r.cells],
    }
    if _lattice_only(r):
        out["points"] = _points(r)
    return out


def diagram_text(d: LinkDiagram) -> str:
    links = " ".join(f"({i},{j})" for i, j in d.links) or "none"
    surv = ",".join(map(str, d.survivors)) or "none"
    return f"links {links}; output {surv}"


def diagram_json(d: LinkDiagram) -> dict:
    return {"links": [list(l) for l in d.links], "survivors": list(d.survivors)}


def audit_json(rep) -> dict:
    return {"exhaustive": rep.exhaustive, "checked": rep.checked, "clean": rep.clean,
            "violations": [[fmt_point(x), fmt_point(y), fmt_point(m)] for x, y, m in rep.violations]}


def audit_text(rep) -> str:
    how = "exhaustive" if rep.exhaustive else "sampled"
    if rep.clean:
        return f"clean ({how}, {rep.checked} pairs)"
    x, y, m = rep.violations[0]
    return (f"WARNING {len(rep.violations)} violation(s) ({how}, {rep.checked} pairs), "
            f"e.g. mix of {fmt_point(x)} and {fmt_point(y)} gives {fmt_point(m)}")


# --------------------------------------------------------------------------
# commands


@lru_cache(maxsize=1)
def _demo() -> Lexicon:
    return load_lexicon("demo")


def _lexicon(args) -> Lexicon:
    path = args.lexicon or args.lexicon_pos or "demo"
    # a bare demo.lex that is not on disk means the shipped copy
    if path == "demo.lex" and not Path(path).exists():
        path = "demo"
    return _demo() if path == "demo" else load_lexicon(path)


def _targets(args, lex: Lexicon) -> list[str]:
    if args.target is not None:
        return [args.target]
    bases = [b for b in lex.interpretation.spaces if b.islower()]
    return ["s"] + [b for b in bases if b != "s"]


def _evaluate(args, lex: Lexicon, phrase: str):
    """Evaluations under the first target the phrase reduces to."""
    targets = _targets(args, lex)
    cap = None if args.all_parses else 1
    for t in targets:
        try:
            return t, evaluate_all(lex, phrase, parse_type_string(t), cap)
        except NoReduction:
            continue
    raise NoReduction(f"{phrase!r} does not reduce to {' or '.join(targets)}")


def cmd_parse(args, out):
    ts = parse_type_string(args.types)
    target = parse_type_string("s" if args.target is None else args.target)
    t0 = time.perf_counter_ns()
    ds = pregroup.reduce(ts, target)
    if not args.all_parses:
        ds = ds[:1]
    us = (time.perf_counter_ns() - t0) // 1000
    report = {"command": "parse", "types": fmt_type(ts), "target": fmt_type(target),
              "grammatical": bool(ds), "diagrams": [diagram_json(d) for d in ds], "elapsed_us": us}
    if args.format == "machine":
        out(json.dumps(report))
    else:
        verdict = "grammatical" if ds else "ungrammatical"
        out(f"{verdict}: {fmt_type(ts)} -> {fmt_type(target)}")
        for k, d in enumerate(ds, 1):
            out(f"diagram {k}: {diagram_text(d)}")
        out(f"time: {us} us")
    return EXIT_OK if ds else EXIT_NEGATIVE


def cmd_meaning(args, out):
    lex = _lexicon(args)
    t0 = time.perf_counter_ns()
    target, evs = _evaluate(args, lex, args.phrase)
    us = (time.perf_counter_ns() - t0) // 1000
    first = evs[0].meaning
    audits = [convexity_audit(e.meaning) for e in evs]
    coincide = all(e.meaning == first for e in evs[1:])
    words = [{"word": w, "entry": e.word, "type": fmt_type(e.type)}
             for w, e in zip(args.phrase.split(), evs[0].words)]
    if args.format == "machine":
        out(json.dumps({
            "command": "meaning", "phrase": args.phrase, "target": target, "words": words,
            "results": [{"diagram": diagram_json(e.diagram), "state": state_json(e.meaning),
                         "audit": audit_json(a)} for e, a in zip(evs, audits)],
            "coincide": coincide, "elapsed_us": us}))
    else:
        out(f"phrase: {args.phrase}")
        out("types: " + " | ".join(w["type"] for w in words) + f" -> {target}")
        for k, (e, a) in enumerate(zip(evs, audits), 1):
            tag = f" {k}" if len(evs) > 1 else ""
            out(f"diagram{tag}: {diagram_text(e.diagram)}")
            out(f"meaning{tag}: {state_text(e.meaning)}")
            out(f"audit{tag}: {audit_text(a)}")
        if len(evs) > 1:
            out(f"parses: {len(evs)}, results {'coincide' if coincide else 'differ'}")
        out(f"time: {us} us")
    return EXIT_NEGATIVE if first.is_empty else EXIT_OK


def cmd_entail(args, out):
    lex = _lexicon(args)
    t0 = time.perf_counter_ns()
    ta, ea = _evaluate(args, lex, args.a)
    tb, eb = _evaluate(args, lex, args.b)
    a, b = ea[0].meaning, eb[0].meaning
    if ta != tb:
        raise ConvexSemError(f"{args.a!r} has type {ta} but {args.b!r} has type {tb}")
    verdict = entails(a, b)
    us = (time.perf_counter_ns() - t0) // 1000
    if args.format == "machine":
        out(json.dumps({"command": "entail", "a": args.a, "b": args.b, "target": ta,
                        "entails": verdict, "a_state": state_json(a), "b_state": state_json(b),
                        "elapsed_us": us}))
    else:
        out(f"{args.a} ⊑ {args.b}: {str(verdict).lower()}")
        out(f"time: {us} us")
    return EXIT_NEGATIVE if a.is_empty else EXIT_OK


def _audits(lex: Lexicon):
    return {w: convexity_audit(e.meaning) for w, e in lex.entries.items()}


def cmd_show(args, out):
    lex = _lexicon(args)
    name = args.name
    machine = args.format == "machine"
    if name in lex.properties:
        p = lex.properties[name]
        if machine:
            out(json.dumps({"command": "show", "property": name, "domain": p.domain.name,
                            "set": set_json(p)}))
        else:
            out(f"property {name} on {p.domain.name}: {p.literal() if isinstance(p, Polytope) else p}")
        return EXIT_OK
    if name in lex.spaces:
        sp = lex.spaces[name]
        if machine:
            out(json.dumps({"command": "show", "space": name, "factors": [d.name for d in sp.factors]}))
        else:
            out(f"space {name} = " + " * ".join(d.name for d in sp.factors))
        return EXIT_OK
    if name in lex.domains:
        d = lex.domains[name]
        if isinstance(d, LatticeDomain):
            desc = {"kind": "lattice", "elements": [fmt_point(e) for e in d.elements]}
        else:
            desc = {"kind": "continuous", "bounds": [[_q(b.lo), _q(b.hi)] for b in d.bounds]}
        if machine:
            out(json.dumps({"command": "show", "domain": name, **desc}))
        elif desc["kind"] == "lattice":
            out(f"domain {name}: lattice {{{', '.join(desc['elements'])}}}")
        else:
            out(f"domain {name}: continuous " + " ".join(str(b) for b in d.bounds))
        return EXIT_OK
    e = lex.lookup(name)
    rep = convexity_audit(e.meaning)
    if machine:
        out(json.dumps({"command": "show", "entry": e.word, "kind": e.kind, "type": fmt_type(e.type),
                        "state": state_json(e.meaning), "audit": audit_json(rep)}))
    else:
        out(f"{e.kind} {e.word} : {fmt_type(e.type)} on {e.meaning.target}")
        for c in e.meaning.cells:
            out(f"  {c}")
        out(f"audit: {audit_text(rep)}")
    return EXIT_OK


def cmd_check(args, out):
    lex = _lexicon(args)
    audits = _audits(lex)
    if args.format == "machine":
        out(json.dumps({"command": "check", "valid": True,
                        "counts": {"domains": len(lex.domains), "spaces": len(lex.spaces),
                                   "properties": len(lex.properties), "entries": len(lex.entries)},
                        "audit": {w: audit_json(r) for w, r in audits.items()}}))
    else:
        out(f"valid: {len(lex.domains)} domains, {len(lex.spaces)} spaces, "
            f"{len(lex.properties)} properties, {len(lex.entries)} entries")
        for w, r in audits.items():
            out(f"{w}: {audit_text(r)}")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lexicon", default=argparse.SUPPRESS,
                        help="lexicon file, or 'demo' for the built-in one")
    common.add_argument("--target", default=argparse.SUPPRESS, help="target type string (default s)")
    common.add_argument("--all-parses", action="store_true", default=argparse.SUPPRESS,
                        help="evaluate every reduction, not just the first")
    common.add_argument("--format", choices=("human", "machine"), default=argparse.SUPPRESS)

    p = _Parser(prog="convexsem", parents=[common],
                description="Compositional meanings in conceptual spaces.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("parse", parents=[common], help="check a type string reduces to the target")
    sp.add_argument("types")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("meaning", parents=[common], help="evaluate a phrase")
    sp.add_argument("lexicon_pos", nargs="?", metavar="lexicon")
    sp.add_argument("phrase")
    sp.set_defaults(func=cmd_meaning)

    sp = sub.add_parser("entail", parents=[common], help="does phrase A entail phrase B")
    sp.add_argument("lexicon_pos", nargs="?", metavar="lexicon")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(func=cmd_entail)

    sp = sub.add_parser("show", parents=[common], help="print an entry, property, space or domain")
    sp.add_argument("lexicon_pos", nargs="?", metavar="lexicon")
    sp.add_argument("name")
    sp.set_defaults(func=cmd_show)

    sp = sub.add_parser("check", parents=[common], help="validate a lexicon and audit its entries")
    sp.add_argument("lexicon_pos", nargs="?", metavar="lexicon")
    sp.set_defaults(func=cmd_check)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or (lambda s: print(s))
    err = err or (lambda s: print(s, file=sys.stderr))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a command is required (parse, meaning, entail, show, check)")
        for k, v in (("lexicon", None), ("lexicon_pos", None), ("target", None),
                     ("all_parses", False), ("format", "human")):
            if not hasattr(args, k):
                setattr(args, k, v)
        if args.target is not None:
            parse_type_string(args.target)
        return args.func(args, out)
    except UsageError as exc:
        err(f"convexsem: usage error: {exc}")
    except NoReduction as exc:
        if args.format == "machine":
            out(json.dumps({"command": args.command, "grammatical": False, "error": str(exc)}))
        else:
            out(f"ungrammatical: {exc}")
        return EXIT_NEGATIVE
    except ParseError as exc:
        err(f"convexsem: syntax error at {exc}")
    except ConvexSemError as exc:
        err(f"convexsem: {type(exc).__name__}: {exc}")
    except OSError as exc:
        err(f"convexsem: cannot read {exc.filename or ''}: {exc.strerror or exc}")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
