"""Compositional meaning in conceptual spaces.

Convex sets over atomic domains, convex relations held as unions of
cells, pregroup reduction, and a small lexicon language tying them
together.
"""

from .convex import (Box, ContinuousDomain, FormalConvexSum, Interval, LatticeDomain, LatticeSet,
                     Polytope, full_set, hull, intersect, meets, member, mix, subset)
from .dsl import format_lexicon, load_lexicon, parse_lexicon
from .errors import ConvexSemError, NoReduction, ParseError, ValidationError
from .pregroup import LinkDiagram, SimpleType, brute_force_reduce, parse_type_string, reduce
from .relations import (Cell, Relation, Space, WirePlan, apply, apply_wire_plan, cap, compose,
                        converse, convexity_audit, copy, cup, delete, identity, merge, tensor)
from .semantics import (Lexicon, LexicalEntry, demo_lexicon, entails, evaluate, evaluate_all,
                        intersective_adjective, interpret_type, lift_property, relative_pronoun)

__version__ = "0.1.0"
