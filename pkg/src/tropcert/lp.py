"""Exact linear feasibility over the rationals.

Fourier-Motzkin elimination on integer-scaled rows.  Strict inequalities are
first-class: a feasible system always yields an exact rational witness, and
infeasibility is a proof, not a tolerance call.  Intended for the small
systems this package produces (a handful of variables).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .linalg import vec_gcd


class Rel(enum.Enum):
    GE = ">="
    GT = ">"
    EQ = "="


@dataclass(frozen=True)
class LinearConstraint:
    """``coeffs . x  rel  rhs`` with exact rational data."""

    coeffs: tuple[Fraction, ...]
    rhs: Fraction
    rel: Rel

    @staticmethod
    def make(coeffs: Sequence[Fraction | int], rhs: Fraction | int | str, rel: Rel) -> "LinearConstraint":
        return LinearConstraint(tuple(Fraction(c) for c in coeffs), Fraction(rhs), rel)

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        val = sum(c * v for c, v in zip(self.coeffs, x, strict=True))
        if self.rel is Rel.GE:
            return val >= self.rhs
        if self.rel is Rel.GT:
            return val > self.rhs
        return val == self.rhs


# internal row: (coeffs int tuple, rhs int, strict bool) meaning coeffs.x >= rhs
_Row = tuple[tuple[int, ...], int, bool]


def _to_rows(constraints: Iterable[LinearConstraint], nvars: int) -> list[_Row] | None:
    """Scale to integer rows, splitting equalities.  None means trivially infeasible."""
    rows: list[_Row] = []
    for c in constraints:
        if len(c.coeffs) != nvars:
            raise ValueError("constraint arity mismatch")
        denom = c.rhs.denominator
        for x in c.coeffs:
            denom = denom // gcd(denom, x.denominator) * x.denominator
        a = tuple(int(x * denom) for x in c.coeffs)
        b = int(c.rhs * denom)
        if c.rel is Rel.EQ:
            rows.append((a, b, False))
            rows.append((tuple(-x for x in a), -b, False))
        else:
            rows.append((a, b, c.rel is Rel.GT))
    return rows


def _normalize(row: _Row) -> _Row | None:
    """Reduce by content; None if the row is a tautology."""
    a, b, strict = row
    g = vec_gcd(a)
    if g == 0:
        return row
    g = gcd(g, abs(b)) or g
    return (tuple(x // g for x in a), b // g, strict)


def _row_holds_trivially(row: _Row) -> bool | None:
    """For a zero-coefficient row: True/False verdict.  None if not constant."""
    a, b, strict = row
    if any(a):
        return None
    return b < 0 if strict else b <= 0


def _combine(lower: _Row, upper: _Row, j: int) -> _Row:
    """Positive combination of a lower and an upper bound row killing x_j."""
    la, lb, ls = lower
    ua, ub, us = upper
    cl = la[j]          # > 0
    cu = -ua[j]         # > 0
    a = tuple(cu * x + cl * y for x, y in zip(la, ua))
    b = cu * lb + cl * ub
    return (a, b, ls or us)


def _eliminate(rows: list[_Row], j: int) -> list[_Row] | None:
    """Project out variable j.  None signals detected infeasibility."""
    lowers, uppers, rest = [], [], []
    for row in rows:
        c = row[0][j]
        if c > 0:
            lowers.append(row)
        elif c < 0:
            uppers.append(row)
        else:
            rest.append(row)
    seen: set[_Row] = set()
    out: list[_Row] = []
    for row in rest:
        verdict = _row_holds_trivially(row)
        if verdict is False:
            return None
        if verdict is True:
            continue
        nr = _normalize(row)
        if nr not in seen:
            seen.add(nr)
            out.append(nr)
    for lo in lowers:
        for up in uppers:
            row = _combine(lo, up, j)
            verdict = _row_holds_trivially(row)
            if verdict is False:
                return None
            if verdict is True:
                continue
            nr = _normalize(row)
            if nr not in seen:
                seen.add(nr)
                out.append(nr)
    return out


def _pick_variable(rows: list[_Row], remaining: list[int]) -> int:
    best, best_cost = remaining[0], None
    for j in remaining:
        lo = sum(1 for r in rows if r[0][j] > 0)
        up = sum(1 for r in rows if r[0][j] < 0)
        cost = lo * up - lo - up
        if best_cost is None or cost < best_cost:
            best, best_cost = j, cost
    return best


def lp_feasible(constraints: Sequence[LinearConstraint],
                nvars: int | None = None) -> tuple[Fraction, ...] | None:
    """Exact feasibility with witness.

    Returns a rational point satisfying every constraint (strict rows
    strictly), or None if the system is infeasible.  An empty system is
    feasible with the zero witness.
    """
    if nvars is None:
        if not constraints:
            return ()
        nvars = len(constraints[0].coeffs)
    rows = _to_rows(constraints, nvars)
    levels: list[tuple[int, list[_Row], list[_Row]]] = []
    remaining = list(range(nvars))
    while remaining:
        j = _pick_variable(rows, remaining)
        lowers = [r for r in rows if r[0][j] > 0]
        uppers = [r for r in rows if r[0][j] < 0]
        levels.append((j, lowers, uppers))
        rows = _eliminate(rows, j)
        if rows is None:
            return None
        remaining.remove(j)
    for row in rows:
        if _row_holds_trivially(row) is False:
            return None

    witness: list[Fraction | None] = [None] * nvars
    for j, lowers, uppers in reversed(levels):
        lo_val = lo_strict = None
        for a, b, strict in lowers:
            bound = Fraction(b - sum(a[k] * witness[k] for k in range(nvars)
                                     if k != j and a[k]), a[j])
            if lo_val is None or bound > lo_val or (bound == lo_val and strict):
                lo_val, lo_strict = bound, strict
        up_val = up_strict = None
        for a, b, strict in uppers:
            bound = Fraction(b - sum(a[k] * witness[k] for k in range(nvars)
                                     if k != j and a[k]), a[j])
            if up_val is None or bound < up_val or (bound == up_val and strict):
                up_val, up_strict = bound, strict
        if lo_val is None and up_val is None:
            witness[j] = Fraction(0)
        elif up_val is None:
            witness[j] = lo_val + 1 if lo_strict else lo_val
        elif lo_val is None:
            witness[j] = up_val - 1 if up_strict else up_val
        elif lo_val == up_val:
            witness[j] = lo_val
        else:
            witness[j] = (lo_val + up_val) / 2
    result = tuple(witness)  # type: ignore[arg-type]
    for c in constraints:
        if not c.satisfied_by(result):  # pragma: no cover - correctness guard
            raise AssertionError("witness reconstruction failed")
    return result


def is_feasible(constraints: Sequence[LinearConstraint], nvars: int | None = None) -> bool:
    return lp_feasible(constraints, nvars) is not None


def project_constraints(constraints: Sequence[LinearConstraint], nvars: int,
                        keep: Sequence[int]) -> list[LinearConstraint] | None:
    """Fourier-Motzkin projection onto the ``keep`` coordinates (in order).

    Returns inequality constraints on the kept variables describing the
    image, or None if the input system is infeasible.
    """
    rows = _to_rows(constraints, nvars)
    keep_set = set(keep)
    for j in range(nvars):
        if j in keep_set:
            continue
        rows = _eliminate(rows, j)
        if rows is None:
            return None
    out = []
    for a, b, strict in rows:
        verdict = _row_holds_trivially((a, b, strict))
        if verdict is False:
            return None
        if verdict is True:
            continue
        coeffs = tuple(Fraction(a[j]) for j in keep)
        out.append(LinearConstraint(coeffs, Fraction(b), Rel.GT if strict else Rel.GE))
    return out


def eliminate_to_single_variable(constraints: Sequence[LinearConstraint],
                                 nvars: int, keep: int) -> list[tuple[Fraction, Fraction, bool]] | None:
    """Fourier-Motzkin projection onto one variable.

    Returns rows ``(c, b, strict)`` meaning ``c * x_keep >= b`` (strictly when
    flagged), or None if infeasibility is detected during elimination.
    """
    rows = _to_rows(constraints, nvars)
    for j in range(nvars):
        if j == keep:
            continue
        rows = _eliminate(rows, j)
        if rows is None:
            return None
    out = []
    for a, b, strict in rows:
        verdict = _row_holds_trivially((a, b, strict))
        if verdict is False:
            return None
        if verdict is True:
            continue
        out.append((Fraction(a[keep]), Fraction(b), strict))
    return out
