"""Integral R-affine polyhedra, polyhedral complexes, and open regions.

A Polyhedron is stored in a canonical H-representation: equalities are the
integer-scaled reduced row echelon rows of the affine hull, inequalities are
the facet rows reduced modulo the equality space, primitive and sorted.  Two
polyhedra are equal as Python values exactly when they are equal as point
sets, and they hash accordingly.  Offsets are rational, normals integral.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from . import lp
from .linalg import (
    Sublattice,
    dot,
    full_lattice,
    integer_kernel,
    rref,
    scale_to_integer,
    solve_linear,
    vec_gcd,
)
from .lp import LinearConstraint, Rel

IntVec = tuple[int, ...]
QVec = tuple[Fraction, ...]
HRow = tuple[IntVec, Fraction]  # <a, x> >= b  (or = b)


class EmptyPolyhedronError(ValueError):
    pass


class GeometryError(ValueError):
    pass


def _scale_row(a: Sequence[Fraction | int], b: Fraction | int) -> HRow | None:
    """Primitive integer normal with matching offset; None for a zero normal."""
    fa = [Fraction(x) for x in a]
    fb = Fraction(b)
    lcm = 1
    for x in fa:
        d = x.denominator
        lcm = lcm // gcd(lcm, d) * d
    ia = [int(x * lcm) for x in fa]
    fb = fb * lcm
    g = vec_gcd(ia)
    if g == 0:
        return None
    return tuple(x // g for x in ia), fb / g


class Polyhedron:
    """Nonempty intersection of rational halfspaces with integer normals."""

    def __init__(self, ambient_rank: int,
                 inequalities: Iterable[tuple[Sequence, Fraction | int]] = (),
                 equalities: Iterable[tuple[Sequence, Fraction | int]] = ()):
        self.ambient_rank = ambient_rank
        raw_ineq: list[HRow] = []
        raw_eq: list[HRow] = []
        for a, b in inequalities:
            row = _scale_row(a, b)
            if row is None:
                if Fraction(b) > 0:
                    raise EmptyPolyhedronError("contradictory constant constraint")
                continue
            raw_ineq.append(row)
        for a, b in equalities:
            row = _scale_row(a, b)
            if row is None:
                if Fraction(b) != 0:
                    raise EmptyPolyhedronError("contradictory constant constraint")
                continue
            raw_eq.append(row)
        self._canonicalize(raw_ineq, raw_eq)

    # -- construction internals ------------------------------------------------

    def _canonicalize(self, ineqs: list[HRow], eqs: list[HRow]) -> None:
        r = self.ambient_rank

        def cons(rows_ge: list[HRow], rows_gt: list[HRow], rows_eq: list[HRow]):
            out = [LinearConstraint.make(a, b, Rel.GE) for a, b in rows_ge]
            out += [LinearConstraint.make(a, b, Rel.GT) for a, b in rows_gt]
            out += [LinearConstraint.make(a, b, Rel.EQ) for a, b in rows_eq]
            return out

        witness = lp.lp_feasible(cons([], ineqs, eqs), r)
        implicit: list[HRow] = []
        if witness is None:
            # not full-dimensional relative to its inequalities: find implicit rows
            if lp.lp_feasible(cons(ineqs, [], eqs), r) is None:
                raise EmptyPolyhedronError("infeasible constraint system")
            for i, row in enumerate(ineqs):
                others = ineqs[:i] + ineqs[i + 1:]
                if lp.lp_feasible(cons(others, [row], eqs), r) is None:
                    implicit.append(row)
        all_eqs = eqs + implicit

        # canonical affine hull rows: RREF order is canonical, pivots ascending
        eq_rows: list[HRow] = []
        if all_eqs:
            red, _piv = rref([list(a) + [b] for a, b in all_eqs])
            for row in red:
                scaled = _scale_row(row[:r], row[r])
                if scaled is not None:
                    eq_rows.append(scaled)
        eq_pivots = [next(j for j, x in enumerate(a) if x != 0) for a, _ in eq_rows]

        # reduce inequalities modulo the equality space
        reduced: dict[IntVec, Fraction] = {}
        if implicit:
            implicit_set = set(implicit)
            ineqs = [row for row in ineqs if row not in implicit_set]
        for a, b in ineqs:
            fa = [Fraction(x) for x in a]
            fb = b
            for piv, (ea, eb) in zip(eq_pivots, eq_rows):
                coef = fa[piv]
                if coef != 0:
                    scale = coef / Fraction(ea[piv])
                    fa = [x - scale * y for x, y in zip(fa, ea)]
                    fb = fb - scale * eb
            row = _scale_row(fa, fb)
            if row is None:
                continue
            a2, b2 = row
            if a2 not in reduced or reduced[a2] < b2:
                reduced[a2] = b2

        # redundancy elimination leaves exactly the facet rows
        rows = sorted(reduced.items())
        kept = list(rows)
        for row in rows:
            if row not in kept:
                continue
            others = [x for x in kept if x != row]
            test = cons(others, [], eq_rows)
            test.append(LinearConstraint.make([-x for x in row[0]], -row[1], Rel.GT))
            if lp.lp_feasible(test, r) is None:
                kept = others
        kept.sort()

        self.equalities: tuple[HRow, ...] = tuple(eq_rows)
        self.inequalities: tuple[HRow, ...] = tuple(kept)
        self._key = (r, self.equalities, self.inequalities)
        if witness is not None and not implicit:
            self._relint = witness
        else:
            self._relint = lp.lp_feasible(
                cons([], list(self.inequalities), list(self.equalities)), r)
            if self._relint is None:  # pragma: no cover - canonicalization guard
                raise EmptyPolyhedronError("relative interior vanished")

    # -- identity ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Polyhedron) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        eqs = ", ".join(f"{list(a)}.x={b}" for a, b in self.equalities)
        ins = ", ".join(f"{list(a)}.x>={b}" for a, b in self.inequalities)
        return f"Polyhedron(r={self.ambient_rank}; {eqs}; {ins})"

    # -- basic geometry ----------------------------------------------------------

    @property
    def relint_point(self) -> QVec:
        return self._relint

    @cached_property
    def dim(self) -> int:
        return self.ambient_rank - len(self.equalities)

    @cached_property
    def direction_lattice(self) -> Sublattice:
        """Integer points of the linear space parallel to the affine hull."""
        if not self.equalities:
            return full_lattice(self.ambient_rank)
        kern = integer_kernel([list(a) for a, _ in self.equalities], self.ambient_rank)
        return Sublattice(self.ambient_rank, tuple(kern))

    def as_constraints(self, strict: bool = False) -> list[LinearConstraint]:
        rel = Rel.GT if strict else Rel.GE
        out = [LinearConstraint.make(a, b, rel) for a, b in self.inequalities]
        out += [LinearConstraint.make(a, b, Rel.EQ) for a, b in self.equalities]
        return out

    def contains(self, x: Sequence[Fraction | int]) -> bool:
        return (all(dot(a, x) == b for a, b in self.equalities)
                and all(dot(a, x) >= b for a, b in self.inequalities))

    def relint_contains(self, x: Sequence[Fraction | int]) -> bool:
        return (all(dot(a, x) == b for a, b in self.equalities)
                and all(dot(a, x) > b for a, b in self.inequalities))

    def subset_of(self, other: "Polyhedron") -> bool:
        base = self.as_constraints()
        for a, b in other.equalities:
            for sgn in (1, -1):
                test = base + [LinearConstraint.make([sgn * x for x in a], sgn * Fraction(b), Rel.GT)]
                if lp.lp_feasible(test, self.ambient_rank) is not None:
                    return False
        for a, b in other.inequalities:
            test = base + [LinearConstraint.make([-x for x in a], -Fraction(b), Rel.GT)]
            if lp.lp_feasible(test, self.ambient_rank) is not None:
                return False
        return True

    def intersect(self, other: "Polyhedron") -> "Polyhedron | None":
        if other.ambient_rank != self.ambient_rank:
            raise GeometryError("ambient rank mismatch")
        try:
            return Polyhedron(self.ambient_rank,
                              list(self.inequalities) + list(other.inequalities),
                              list(self.equalities) + list(other.equalities))
        except EmptyPolyhedronError:
            return None

    def translate(self, v: Sequence[Fraction | int]) -> "Polyhedron":
        return Polyhedron(
            self.ambient_rank,
            [(a, b + dot(a, v)) for a, b in self.inequalities],
            [(a, b + dot(a, v)) for a, b in self.equalities])

    def vertex(self) -> QVec:
        """The unique point of a 0-dimensional polyhedron."""
        if self.dim != 0:
            raise GeometryError("vertex() requires a 0-dimensional polyhedron")
        sol = solve_linear([list(a) for a, _ in self.equalities],
                           [b for _, b in self.equalities])
        assert sol is not None
        return sol

    # -- faces --------------------------------------------------------------------

    @cached_property
    def _facets(self) -> tuple["Polyhedron", ...]:
        out = []
        for i, (a, b) in enumerate(self.inequalities):
            rest = [row for j, row in enumerate(self.inequalities) if j != i]
            out.append(Polyhedron(self.ambient_rank, rest,
                                  list(self.equalities) + [(a, b)]))
        return tuple(out)

    def facets(self) -> tuple["Polyhedron", ...]:
        return self._facets

    def faces(self) -> list["Polyhedron"]:
        """All faces including the polyhedron itself, deduplicated."""
        seen: dict[Polyhedron, None] = {}

        def walk(p: "Polyhedron") -> None:
            if p in seen:
                return
            seen[p] = None
            for f in p.facets():
                walk(f)

        walk(self)
        return list(seen)


def whole_space(r: int) -> Polyhedron:
    return Polyhedron(r)


def polyhedron_from_generators(r: int, points: Sequence[Sequence[Fraction | int]],
                               rays: Sequence[Sequence[Fraction | int]] = ()) -> Polyhedron:
    """Convex hull of finitely many points plus nonnegative ray span.

    Desk-scale double description: used by tests and fixtures, not hot paths.
    The H-representation is recovered by projecting the standard lift
    ``x = sum s_i p_i + sum t_j r_j, sum s_i = 1, s, t >= 0``.
    """
    if not points:
        raise GeometryError("need at least one point")
    np_, nr = len(points), len(rays)
    total = r + np_ + nr
    cons: list[LinearConstraint] = []
    for i in range(r):
        coeffs = [Fraction(0)] * total
        coeffs[i] = Fraction(-1)
        for k, p in enumerate(points):
            coeffs[r + k] = Fraction(p[i])
        for k, ray in enumerate(rays):
            coeffs[r + np_ + k] = Fraction(ray[i])
        cons.append(LinearConstraint.make(coeffs, 0, Rel.EQ))
    coeffs = [Fraction(0)] * total
    for k in range(np_):
        coeffs[r + k] = Fraction(1)
    cons.append(LinearConstraint.make(coeffs, 1, Rel.EQ))
    for k in range(np_ + nr):
        coeffs = [Fraction(0)] * total
        coeffs[r + k] = Fraction(1)
        cons.append(LinearConstraint.make(coeffs, 0, Rel.GE))
    rows = lp.project_constraints(cons, total, list(range(r)))
    assert rows is not None
    return Polyhedron(r, [(c.coeffs, c.rhs) for c in rows])


# ---------------------------------------------------------------------------
# complexes

class PolyComplex:
    """A finite polyhedral complex with stable integer cell ids.

    Cells are deduplicated and sorted canonically, so equal complexes assign
    equal ids.  ``validate()`` checks closure under faces and that pairwise
    intersections are common faces.
    """

    def __init__(self, ambient_rank: int, cells: Iterable[Polyhedron] = ()):
        self.ambient_rank = ambient_rank
        uniq: dict[Polyhedron, None] = {}
        for c in cells:
            if c.ambient_rank != ambient_rank:
                raise GeometryError("cell has wrong ambient rank")
            uniq[c] = None
        ordered = sorted(uniq, key=lambda p: (p.dim, p.equalities, p.inequalities))
        self.cells: tuple[Polyhedron, ...] = tuple(ordered)
        self._index = {c: i for i, c in enumerate(self.cells)}

    @classmethod
    def from_cells(cls, ambient_rank: int, generators: Iterable[Polyhedron]) -> "PolyComplex":
        closure: dict[Polyhedron, None] = {}
        for g in generators:
            for f in g.faces():
                closure[f] = None
        return cls(ambient_rank, closure)

    def __len__(self) -> int:
        return len(self.cells)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyComplex)
                and other.ambient_rank == self.ambient_rank
                and other.cells == self.cells)

    def __hash__(self) -> int:
        return hash((self.ambient_rank, self.cells))

    def cell(self, cid: int) -> Polyhedron:
        return self.cells[cid]

    def id_of(self, p: Polyhedron) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise GeometryError("polyhedron is not a cell of the complex") from None

    def ids_of_dim(self, d: int) -> list[int]:
        return [i for i, c in enumerate(self.cells) if c.dim == d]

    @cached_property
    def maximal_ids(self) -> tuple[int, ...]:
        out = []
        for i, c in enumerate(self.cells):
            contained = any(o is not c and o.dim > c.dim and o.contains(c.relint_point)
                            for o in self.cells)
            if not contained:
                out.append(i)
        return tuple(out)

    @cached_property
    def dim(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    def cells_containing(self, p: Polyhedron, min_dim: int | None = None) -> list[int]:
        """Ids of cells having ``p`` as a face (tested at p's relative interior)."""
        x = p.relint_point
        out = []
        for i, c in enumerate(self.cells):
            if min_dim is not None and c.dim < min_dim:
                continue
            if c.contains(x):
                out.append(i)
        return out

    def support_contains(self, x: Sequence[Fraction | int]) -> bool:
        return any(c.contains(x) for c in self.cells)

    def find_cell_with_relint(self, x: Sequence[Fraction | int]) -> int | None:
        """The unique cell whose relative interior contains ``x``, if any."""
        for i, c in enumerate(self.cells):
            if c.relint_contains(x):
                return i
        return None

    def validate(self) -> None:
        for c in self.cells:
            for f in c.faces():
                if f not in self._index:
                    raise GeometryError("complex is not closed under faces")
        for p, q in itertools.combinations(self.cells, 2):
            inter = p.intersect(q)
            if inter is None:
                continue
            if inter not in self._index:
                raise GeometryError("cell intersection is not a cell")
            if inter not in p.faces() or inter not in q.faces():
                raise GeometryError("cell intersection is not a common face")


def common_refinement(c1: PolyComplex, c2: PolyComplex) -> PolyComplex:
    """Complex of all intersections of cells; supports ``|c1| & |c2|``."""
    if c1.ambient_rank != c2.ambient_rank:
        raise GeometryError("ambient rank mismatch")
    gens = []
    for i in c1.maximal_ids:
        for j in c2.maximal_ids:
            inter = c1.cell(i).intersect(c2.cell(j))
            if inter is not None:
                gens.append(inter)
    return PolyComplex.from_cells(c1.ambient_rank, gens)


def subdivide_along(c: PolyComplex, hyperplanes: Iterable[tuple[Sequence[int], Fraction | int]]) -> PolyComplex:
    """Refine so every cell lies in a closed halfspace of each hyperplane."""
    pieces = [c.cell(i) for i in c.maximal_ids]
    for a, b in hyperplanes:
        nxt: dict[Polyhedron, None] = {}
        for p in pieces:
            plus = p.intersect(Polyhedron(c.ambient_rank, [(a, b)]))
            minus = p.intersect(Polyhedron(c.ambient_rank, [(tuple(-x for x in a), -Fraction(b))]))
            for piece in (plus, minus):
                if piece is not None and piece.dim == p.dim:
                    nxt[piece] = None
        pieces = list(nxt)
    return PolyComplex.from_cells(c.ambient_rank, pieces)


def split_by_hyperplanes(p: Polyhedron, hyperplanes: Iterable[tuple[IntVec, Fraction]]) -> list[Polyhedron]:
    """Maximal pieces of one polyhedron in a hyperplane arrangement."""
    pieces = [p]
    for a, b in hyperplanes:
        nxt: dict[Polyhedron, None] = {}
        for piece in pieces:
            plus = piece.intersect(Polyhedron(p.ambient_rank, [(a, b)]))
            minus = piece.intersect(Polyhedron(p.ambient_rank, [(tuple(-x for x in a), -b)]))
            for q in (plus, minus):
                if q is not None and q.dim == piece.dim:
                    nxt[q] = None
        pieces = list(nxt)
    return pieces


def arrangement_hyperplanes(polys: Iterable[Polyhedron]) -> list[tuple[IntVec, Fraction]]:
    """Canonical list of all supporting hyperplanes of the given polyhedra."""
    seen: dict[tuple[IntVec, Fraction], None] = {}
    for p in polys:
        for a, b in list(p.inequalities) + list(p.equalities):
            lead = next(x for x in a if x != 0)
            if lead < 0:
                a, b = tuple(-x for x in a), -b
            seen[(a, b)] = None
    return list(seen)


# ---------------------------------------------------------------------------
# open regions

@dataclass(frozen=True)
class OpenRegion:
    """A finite union of relatively open polyhedral pieces.

    Each clause is a conjunction of constraints (strict, non-strict, or
    equality); the region is the union of the clause solution sets.
    """

    ambient_rank: int
    clauses: tuple[tuple[LinearConstraint, ...], ...]

    @staticmethod
    def whole(r: int) -> "OpenRegion":
        return OpenRegion(r, ((),))

    @staticmethod
    def from_clause(r: int, constraints: Iterable[LinearConstraint]) -> "OpenRegion":
        return OpenRegion(r, (tuple(constraints),))

    @staticmethod
    def open_box(r: int, lo: Fraction | int, hi: Fraction | int) -> "OpenRegion":
        cons = []
        for i in range(r):
            e = [0] * r
            e[i] = 1
            cons.append(LinearConstraint.make(e, lo, Rel.GT))
            cons.append(LinearConstraint.make([-x for x in e], -Fraction(hi), Rel.GT))
        return OpenRegion.from_clause(r, cons)

    @cached_property
    def feasible_clauses(self) -> tuple[int, ...]:
        out = []
        for i, clause in enumerate(self.clauses):
            if lp.lp_feasible(list(clause), self.ambient_rank) is not None:
                out.append(i)
        return tuple(out)

    def contains_point(self, x: Sequence[Fraction | int]) -> bool:
        return any(all(c.satisfied_by(tuple(Fraction(v) for v in x)) for c in clause)
                   for clause in self.clauses)

    def union(self, other: "OpenRegion") -> "OpenRegion":
        if other.ambient_rank != self.ambient_rank:
            raise GeometryError("ambient rank mismatch")
        return OpenRegion(self.ambient_rank, self.clauses + other.clauses)


def cell_meets_region(p: Polyhedron, omega: OpenRegion) -> bool:
    """Does the cell intersect the region?  Strict clause rows stay strict."""
    if omega.ambient_rank != p.ambient_rank:
        raise GeometryError("ambient rank mismatch")
    base = p.as_constraints()
    for i in omega.feasible_clauses:
        if lp.lp_feasible(base + list(omega.clauses[i]), p.ambient_rank) is not None:
            return True
    return False


def relint_meets_region(p: Polyhedron, omega: OpenRegion) -> bool:
    """Like cell_meets_region but against the cell's relative interior."""
    base = p.as_constraints(strict=True)
    for i in omega.feasible_clauses:
        if lp.lp_feasible(base + list(omega.clauses[i]), p.ambient_rank) is not None:
            return True
    return False


def region_meets_witness(p: Polyhedron, omega: OpenRegion) -> QVec | None:
    base = p.as_constraints()
    for i in omega.feasible_clauses:
        w = lp.lp_feasible(base + list(omega.clauses[i]), p.ambient_rank)
        if w is not None:
            return w
    return None


def union_of_polyhedra_is_convex(pieces: Sequence[Polyhedron]) -> bool:
    """Is the union of closed polyhedra itself convex (hence a polyhedron)?

    The candidate hull is the intersection of all constraints valid on every
    piece; the union is convex iff that candidate is contained in the union.
    """
    pieces = [p for p in pieces]
    if len(pieces) <= 1:
        return True
    r = pieces[0].ambient_rank
    valid: list[LinearConstraint] = []
    for p in pieces:
        for a, b in list(p.inequalities):
            if all(_constraint_valid_on(q, a, b, Rel.GE) for q in pieces):
                valid.append(LinearConstraint.make(a, b, Rel.GE))
        for a, b in list(p.equalities):
            if all(_constraint_valid_on(q, a, b, Rel.EQ) for q in pieces):
                valid.append(LinearConstraint.make(a, b, Rel.EQ))
    # a point of the candidate outside every piece witnesses non-convexity
    violations = []
    for p in pieces:
        rows = [LinearConstraint.make([-x for x in a], -b, Rel.GT) for a, b in p.inequalities]
        for a, b in p.equalities:
            rows.append(LinearConstraint.make(a, b, Rel.GT))
            rows.append(LinearConstraint.make([-x for x in a], -b, Rel.GT))
        violations.append(rows)
    for combo in itertools.product(*violations):
        if lp.lp_feasible(valid + list(combo), r) is not None:
            return False
    return True


def _constraint_valid_on(q: Polyhedron, a: IntVec, b: Fraction, rel: Rel) -> bool:
    neg = LinearConstraint.make([-x for x in a], -b, Rel.GT)
    if lp.lp_feasible(q.as_constraints() + [neg], q.ambient_rank) is not None:
        return False
    if rel is Rel.EQ:
        pos = LinearConstraint.make(a, b, Rel.GT)
        if lp.lp_feasible(q.as_constraints() + [pos], q.ambient_rank) is not None:
            return False
    return True
