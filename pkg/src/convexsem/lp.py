"""Exact rational linear programming.

A dense two-phase primal simplex over :class:`fractions.Fraction` with
Bland's pivoting rule.  Problems here are desk sized (a few hundred
columns at most), so clarity wins over sparse tricks.  Because no value
is ever rounded there is no tolerance anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import MalformedInput

try:  # C rationals; identical results, much faster pivots
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction


def _q(x) -> "_Q":
    x = Fraction(x)
    return _Q(x.numerator, x.denominator)


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_SENSES = ("<=", ">=", "==")


@dataclass
class Solution:
    status: str
    values: list[Fraction] = field(default_factory=list)
    objective: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


class LinearProgram:
    """Incrementally built LP over named-by-index variables.

    >>> lp = LinearProgram()
    >>> x = lp.var()
    >>> lp.add({x: 1}, ">=", 0); lp.add({x: 1}, "<=", 1)
    >>> lp.maximize({x: 1}).values
    [Fraction(1, 1)]
    """

    def __init__(self):
        self._nonneg: list[bool] = []
        self._rows: list[tuple[dict[int, Fraction], str, Fraction]] = []

    @property
    def nvars(self) -> int:
        return len(self._nonneg)

    def var(self, nonneg: bool = False) -> int:
        self._nonneg.append(nonneg)
        return len(self._nonneg) - 1

    def vars(self, n: int, nonneg: bool = False) -> list[int]:
        return [self.var(nonneg) for _ in range(n)]

    def add(self, coeffs: Mapping[int, object], sense: str, rhs) -> None:
        if sense not in _SENSES:
            raise MalformedInput(f"unknown constraint sense {sense!r}")
        row = {}
        for k, v in coeffs.items():
            if not 0 <= k < self.nvars:
                raise MalformedInput(f"variable index {k} out of range")
            v = Fraction(v)
            if v:
                row[k] = row.get(k, 0) + v
        self._rows.append((row, sense, Fraction(rhs)))

    def feasible(self) -> Solution:
        return self.maximize({})

    def maximize(self, objective: Mapping[int, object]) -> Solution:
        # Column layout: each variable gets a "+" column, free variables also
        # a "-" column, then one slack per inequality row.
        col_of: list[tuple[int, int | None]] = []
        ncols = 0
        for nonneg in self._nonneg:
            if nonneg:
                col_of.append((ncols, None))
                ncols += 1
            else:
                col_of.append((ncols, ncols + 1))
                ncols += 2
        nslack = sum(1 for _, sense, _ in self._rows if sense != "==")
        nstruct = ncols + nslack

        rows = []
        slack = ncols
        for coeffs, sense, rhs in self._rows:
            row = [_Q(0)] * nstruct
            for k, v in coeffs.items():
                pos, neg = col_of[k]
                v = _q(v)
                row[pos] += v
                if neg is not None:
                    row[neg] -= v
            if sense == "<=":
                row[slack] = _Q(1)
                slack += 1
            elif sense == ">=":
                row[slack] = _Q(-1)
                slack += 1
            rhs = _q(rhs)
            if rhs < 0:
                row = [-a for a in row]
                rhs = -rhs
            rows.append(row + [rhs])

        cost = [_Q(0)] * nstruct
        for k, v in objective.items():
            pos, neg = col_of[k]
            cost[pos] += _q(v)
            if neg is not None:
                cost[neg] -= _q(v)

        status, x, value = _two_phase(rows, cost, nstruct)
        if status == INFEASIBLE:
            return Solution(INFEASIBLE)
        values = []
        for pos, neg in col_of:
            values.append(_frac(x[pos] - (x[neg] if neg is not None else 0)))
        return Solution(status, values, None if value is None else _frac(value))


def _pivot(tab: list[list], r: int, c: int) -> None:
    prow = tab[r]
    p = prow[c]
    if p != 1:
        prow[:] = [a / p for a in prow]
    nz = [(j, a) for j, a in enumerate(prow) if a]
    for i, row in enumerate(tab):
        if i == r:
            continue
        f = row[c]
        if f:
            for j, a in nz:
                row[j] -= f * a


def _run(tab, basis, zrow_index) -> str:
    """Maximize using the objective row ``tab[zrow_index]`` (reduced costs)."""
    z = tab[zrow_index]
    m = zrow_index
    width = len(z) - 1
    while True:
        enter = next((j for j in range(width) if z[j] > 0), None)
        if enter is None:
            return OPTIMAL
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        r = best[1]
        _pivot(tab, r, enter)
        basis[r] = enter


def _zrow(tab, basis, cost):
    m = len(basis)
    width = len(tab[0])
    z = [_Q(0)] * width
    for j, c in enumerate(cost):
        z[j] = c
    for i in range(m):
        cb = cost[basis[i]] if basis[i] < len(cost) else 0
        if cb:
            row = tab[i]
            for j in range(width):
                if row[j]:
                    z[j] -= cb * row[j]
    return z


def _two_phase(rows, cost, nstruct):
    m = len(rows)
    if m == 0:
        # only sign constraints: origin is feasible
        if any(c > 0 for c in cost):
            return UNBOUNDED, [_Q(0)] * nstruct, None
        return OPTIMAL, [_Q(0)] * nstruct, _Q(0)

    # phase 1: one artificial per row
    tab = []
    for i, row in enumerate(rows):
        art = [_Q(0)] * m
        art[i] = _Q(1)
        tab.append(row[:-1] + art + [row[-1]])
    basis = [nstruct + i for i in range(m)]
    phase1_cost = [_Q(0)] * nstruct + [_Q(-1)] * m
    tab.append(_zrow(tab, basis, phase1_cost))
    _run(tab, basis, m)
    if tab[m][-1] != 0:
        # z row rhs holds minus the objective; nonzero means artificials > 0
        return INFEASIBLE, None, None
    tab.pop()

    # drive remaining artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= nstruct:
            col = next((j for j in range(nstruct) if tab[i][j] != 0), None)
            if col is None:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, i, col)
            basis[i] = col
        i += 1
    tab = [row[:nstruct] + [row[-1]] for row in tab]

    m = len(basis)
    tab.append(_zrow(tab, basis, cost))
    status = _run(tab, basis, m)
    x = [_Q(0)] * nstruct
    for i, b in enumerate(basis):
        x[b] = tab[i][-1]
    if status == UNBOUNDED:
        return UNBOUNDED, x, None
    value = sum((c * v for c, v in zip(cost, x)), _Q(0))
    return OPTIMAL, x, value


@dataclass(frozen=True)
class Constraint:
    """``coeffs · x  sense  rhs``; ``strict`` turns ``<=``/``>=`` into ``<``/``>``."""

    coeffs: tuple
    sense: str
    rhs: Fraction
    strict: bool = False


@dataclass
class Feasibility:
    feasible: bool
    strictly_feasible: bool
    witness: list[Fraction] | None
    slack: Fraction | None


def lp_feasible(constraints: Sequence[Constraint], nvars: int | None = None) -> Feasibility:
    """Decide weak and strict feasibility of a system over free variables.

    One LP is solved: maximize a shared slack ``t <= 1`` that is subtracted
    from every strict inequality (or from every inequality when none is
    flagged strict, which centres the witness).  The weak system is
    feasible iff the optimum is ``>= 0``, the strict one iff it is ``> 0``.
    """
    if nvars is None:
        nvars = max((len(c.coeffs) for c in constraints), default=0)
    for c in constraints:
        if len(c.coeffs) != nvars:
            raise MalformedInput(
                f"constraint has {len(c.coeffs)} coefficients, expected {nvars}")
        if c.sense not in _SENSES:
            raise MalformedInput(f"unknown constraint sense {c.sense!r}")
        if c.strict and c.sense == "==":
            raise MalformedInput("equalities cannot be strict")

    any_strict = any(c.strict for c in constraints)
    lp = LinearProgram()
    xs = lp.vars(nvars)
    t = lp.var()
    lp.add({t: 1}, "<=", 1)
    for c in constraints:
        row = {x: a for x, a in zip(xs, c.coeffs)}
        slacked = c.sense != "==" and (c.strict or not any_strict)
        if slacked:
            row[t] = 1 if c.sense == "<=" else -1
        lp.add(row, c.sense, c.rhs)
    sol = lp.maximize({t: 1})
    if not sol.feasible:
        return Feasibility(False, False, None, None)
    best = sol.objective
    witness = sol.values[:nvars] if best >= 0 else None
    return Feasibility(best >= 0, best > 0, witness, best)
