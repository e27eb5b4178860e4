"""Exception hierarchy shared by every layer of the engine."""


class ConvexSemError(Exception):
    """Base class for all engine errors."""


class MalformedSum(ConvexSemError):
    """A formal convex sum has negative weights or weights not summing to 1."""


class MalformedInput(ConvexSemError):
    pass


class DomainMismatch(ConvexSemError):
    pass


class EmptyIntersection(ConvexSemError):
    pass


class UnsupportedIntersection(ConvexSemError):
    """Two polytopes meet but their intersection is too costly to enumerate.

    Facets and vertices are found by brute force over subsets, which is
    capped (see :mod:`convexsem.polyhedra`).
    """


class SpaceMismatch(ConvexSemError):
    pass


class MalformedPlan(ConvexSemError):
    pass


class InputTooLarge(ConvexSemError):
    pass


class UnknownBase(ConvexSemError):
    pass


class UnknownWord(ConvexSemError):
    pass


class NoReduction(ConvexSemError):
    """The phrase's types do not reduce to the requested target."""


class ParseError(ConvexSemError):
    """Positioned syntax error in a type string or lexicon document."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


class ValidationError(ConvexSemError):
    pass
