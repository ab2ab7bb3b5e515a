"""Exact integer and rational linear algebra.

Everything here is exact: integer vectors/matrices with arbitrary precision,
Hermite and Smith normal forms with unimodular transforms, integer kernels,
and rational Gaussian elimination.  No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

IntVec = tuple[int, ...]
QVec = tuple[Fraction, ...]


class LinalgError(ValueError):
    pass


def vec_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive_vector(v: Sequence[int]) -> IntVec:
    """Divide out the content of a nonzero integer vector, keeping direction."""
    g = vec_gcd(v)
    if g == 0:
        raise LinalgError("zero vector has no primitive part")
    return tuple(x // g for x in v)


def scale_to_integer(v: Sequence[Fraction | int]) -> IntVec:
    """Smallest positive multiple of a rational vector with integer entries."""
    fracs = [Fraction(x) for x in v]
    lcm = 1
    for x in fracs:
        d = x.denominator
        lcm = lcm // gcd(lcm, d) * d
    return tuple(int(x * lcm) for x in fracs)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b, strict=True))


def mat_vec(rows: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(r, v) for r in rows)


def vec_add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_scale(c, v: Sequence) -> tuple:
    return tuple(c * x for x in v)


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# rational elimination

def rref(rows: Iterable[Sequence[Fraction | int]]) -> tuple[list[QVec], list[int]]:
    """Reduced row echelon form over the rationals.

    Returns the nonzero rows (pivots are 1, pivot columns cleared elsewhere)
    and the pivot column indices.  Canonical for the row space.
    """
    mat = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    if not mat:
        return [], []
    ncols = len(mat[0])
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(mat)):
            if mat[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = Fraction(1) / mat[r][col]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


def rational_rank(rows: Iterable[Sequence[Fraction | int]]) -> int:
    return len(rref(rows)[0])


def solve_linear(rows: Sequence[Sequence[Fraction | int]],
                 rhs: Sequence[Fraction | int]) -> QVec | None:
    """One rational solution of ``rows @ x = rhs`` (free variables 0), or None."""
    if not rows:
        return None
    n = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs, strict=True)]
    red, pivots = rref(aug)
    for row, p in zip(red, pivots):
        if p == n:
            return None
    x = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        x[p] = row[n] - sum(row[j] * x[j] for j in range(p + 1, n) if row[j] != 0)
    return tuple(x)


# ---------------------------------------------------------------------------
# Hermite normal form

def hermite_normal_form(rows: Iterable[Sequence[int]]) -> list[IntVec]:
    """Canonical basis of the integer row span.

    Row-style HNF: pivots positive, entries above each pivot reduced into
    ``[0, pivot)``, rows ordered by pivot column, zero rows dropped.
    """
    basis: list[list[int]] = []  # echelon rows, pivot columns strictly increasing
    piv_cols: list[int] = []

    for r in rows:
        vec = list(r)
        for idx in range(len(basis)):
            j = piv_cols[idx]
            if any(vec[k] != 0 for k in range(j)):
                break
            if vec[j] == 0:
                continue
            a, b = basis[idx][j], vec[j]
            g, s, t = _xgcd(a, b)
            u, v = a // g, b // g
            combined = [s * x + t * y for x, y in zip(basis[idx], vec)]
            vec = [u * y - v * x for x, y in zip(basis[idx], vec)]
            basis[idx] = combined
        lead = next((k for k, x in enumerate(vec) if x != 0), None)
        if lead is None:
            continue
        pos = next((i for i, c in enumerate(piv_cols) if c > lead), len(basis))
        basis.insert(pos, vec)
        piv_cols.insert(pos, lead)

    # normalize: positive pivots, entries above pivots reduced into [0, pivot)
    for i in range(len(basis) - 1, -1, -1):
        j = piv_cols[i]
        if basis[i][j] < 0:
            basis[i] = [-x for x in basis[i]]
        p = basis[i][j]
        for k in range(i):
            q = basis[k][j] // p
            if q:
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[i])]
    return [tuple(r) for r in basis]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, s, t with s*a + t*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# Smith normal form

def smith_normal_form(mat: Sequence[Sequence[int]]) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Diagonal ``d`` and unimodular ``U``, ``V`` with ``U @ mat @ V`` diagonal.

    The diagonal is nonnegative and satisfies the chain d1 | d2 | ...
    """
    A = [list(r) for r in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity_matrix(m)
    V = identity_matrix(n)

    def row_op(i: int, j: int, c: int) -> None:  # row_i -= c * row_j
        A[i] = [x - c * y for x, y in zip(A[i], A[j])]
        U[i] = [x - c * y for x, y in zip(U[i], U[j])]

    def col_op(i: int, j: int, c: int) -> None:  # col_i -= c * col_j
        for row in A:
            row[i] -= c * row[j]
        for row in V:
            row[i] -= c * row[j]

    def swap_rows(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def clear_block(t: int) -> None:
        """Make A[t][t] the only nonzero entry of its row and column."""
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    row_op(i, t, q)
                    if A[i][t]:
                        swap_rows(t, i)
            if any(A[i][t] for i in range(t + 1, m)):
                continue
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    col_op(j, t, q)
                    if A[t][j]:
                        swap_cols(t, j)
            if any(A[t][j] for j in range(t + 1, n)):
                continue
            if any(A[i][t] for i in range(t + 1, m)):
                continue
            return

    t = 0
    while t < m and t < n:
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        clear_block(t)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    rank = t
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if a and b % a != 0:
                changed = True
                col_op(i, i + 1, -1)  # col_i += col_{i+1}: puts b below the pivot
                clear_block(i)
                if A[i][i] < 0:
                    A[i] = [-x for x in A[i]]
                    U[i] = [-x for x in U[i]]
                if A[i + 1][i + 1] < 0:
                    A[i + 1] = [-x for x in A[i + 1]]
                    U[i + 1] = [-x for x in U[i + 1]]
    diag = [A[i][i] for i in range(min(m, n))]
    return diag, U, V


def integer_determinant(mat: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss determinant of a square integer matrix."""
    A = [list(r) for r in mat]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if piv is None:
                return 0
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def integer_matrix_inverse(mat: Sequence[Sequence[int]]) -> list[IntVec]:
    """Exact inverse of a unimodular integer matrix."""
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(mat)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise LinalgError("matrix is singular")
    inv = []
    for row in red:
        ent = []
        for x in row[n:]:
            if x.denominator != 1:
                raise LinalgError("matrix is not unimodular")
            ent.append(int(x))
        inv.append(tuple(ent))
    return inv


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int | None = None) -> list[IntVec]:
    """Basis of the saturated lattice ``{x in Z^n : rows @ x = 0}``."""
    if not rows:
        if ncols is None:
            raise LinalgError("ambient dimension unknown for empty system")
        return [tuple(1 if i == j else 0 for j in range(ncols)) for i in range(ncols)]
    n = len(rows[0])
    diag, _U, V = smith_normal_form(rows)
    rank = sum(1 for d in diag if d != 0)
    out = [tuple(V[i][j] for i in range(n)) for j in range(rank, n)]
    return hermite_normal_form(out)


# ---------------------------------------------------------------------------
# sublattices

@dataclass(frozen=True)
class Sublattice:
    """A sublattice of Z^r, stored by its canonical Hermite basis rows."""

    ambient_rank: int
    basis: tuple[IntVec, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coords(self, v: Sequence[Fraction | int]) -> QVec | None:
        """Coordinates of ``v`` in the basis, or None if outside the span."""
        if not self.basis:
            return () if all(x == 0 for x in v) else None
        cols = [[b[i] for b in self.basis] for i in range(self.ambient_rank)]
        return solve_linear(cols, v)

    def contains(self, v: Sequence[int]) -> bool:
        c = self.coords(v)
        return c is not None and all(x.denominator == 1 for x in c)

    def spans(self, v: Sequence[Fraction | int]) -> bool:
        return self.coords(v) is not None

    def saturation(self) -> "Sublattice":
        """The lattice of all integer points in the rational span."""
        if not self.basis or self.rank == self.ambient_rank:
            return self if not self.basis else full_lattice(self.ambient_rank)
        perp = integer_kernel([list(b) for b in self.basis])
        sat = integer_kernel([list(b) for b in perp], self.ambient_rank)
        return Sublattice(self.ambient_rank, tuple(sat))

    def sum(self, other: "Sublattice") -> "Sublattice":
        if other.ambient_rank != self.ambient_rank:
            raise LinalgError("ambient rank mismatch")
        return hermite_basis(list(self.basis) + list(other.basis), self.ambient_rank)


def full_lattice(r: int) -> Sublattice:
    return Sublattice(r, tuple(tuple(1 if i == j else 0 for j in range(r)) for i in range(r)))


def hermite_basis(generators: Iterable[Sequence[int]], ambient_rank: int | None = None) -> Sublattice:
    gens = [tuple(int(x) for x in g) for g in generators]
    if gens:
        ranks = {len(g) for g in gens}
        if len(ranks) != 1:
            raise LinalgError("generators have mismatched lengths")
        r = ranks.pop()
        if ambient_rank is not None and ambient_rank != r:
            raise LinalgError("ambient rank does not match generators")
    else:
        if ambient_rank is None:
            raise LinalgError("ambient rank required for empty generator set")
        r = ambient_rank
    return Sublattice(r, tuple(hermite_normal_form(gens)))


def lattice_index(outer: Sublattice, inner: Sublattice) -> int:
    """Group index ``[outer : inner]`` for a finite-index pair of sublattices."""
    if outer.ambient_rank != inner.ambient_rank:
        raise LinalgError("ambient rank mismatch")
    if inner.rank != outer.rank:
        raise LinalgError("rank mismatch: index is infinite")
    if outer.rank == 0:
        return 1
    coord_rows = []
    for b in inner.basis:
        c = outer.coords(b)
        if c is None or any(x.denominator != 1 for x in c):
            raise LinalgError("inner lattice is not contained in outer lattice")
        coord_rows.append([int(x) for x in c])
    diag, _, _ = smith_normal_form(coord_rows)
    idx = 1
    for d in diag:
        if d == 0:
            raise LinalgError("rank mismatch: index is infinite")
        idx *= d
    return idx


@dataclass(frozen=True)
class QuotientMap:
    """Coordinates on the free quotient Z^r / sat(tau).

    ``rows`` maps an ambient integer vector to its quotient coordinates;
    ``lift`` sends quotient coordinates back to an ambient representative.
    """

    ambient_rank: int
    sub_rank: int
    rows: tuple[IntVec, ...]
    lift_rows: tuple[IntVec, ...]

    def coords(self, v: Sequence[int]) -> IntVec:
        return mat_vec(self.rows, v)

    def coords_q(self, v: Sequence[Fraction | int]) -> QVec:
        return tuple(Fraction(x) for x in mat_vec(self.rows, v))

    def lift(self, q: Sequence[int]) -> IntVec:
        ext = [0] * self.sub_rank + list(q)
        return mat_vec(self.lift_rows, ext)


def quotient_map(tau: Sublattice) -> QuotientMap:
    sat = tau.saturation()
    r = tau.ambient_rank
    k = sat.rank
    if k == 0:
        ident = tuple(tuple(1 if i == j else 0 for j in range(r)) for i in range(r))
        return QuotientMap(r, 0, ident, ident)
    cols = [[sat.basis[j][i] for j in range(k)] for i in range(r)]  # r x k
    diag, U, _V = smith_normal_form(cols)
    if any(d != 1 for d in diag[:k]):  # pragma: no cover - saturation guarantees 1s
        raise LinalgError("saturation failed")
    Uinv = integer_matrix_inverse(U)
    rows = tuple(tuple(U[i][j] for j in range(r)) for i in range(k, r))
    lift = tuple(tuple(Uinv[i][j] for j in range(r)) for i in range(r))
    return QuotientMap(r, k, rows, lift)


def primitive_quotient_vector(v: Sequence[int], tau: Sublattice) -> IntVec:
    """Integer vector whose image generates the ray of ``v`` in Z^r / tau.

    The result ``w`` satisfies ``w = lam * v  (mod span tau)`` for some
    ``lam > 0`` and its image in the free quotient is primitive.
    """
    qm = quotient_map(tau)
    q = qm.coords(v)
    g = vec_gcd(q)
    if g == 0:
        raise LinalgError("vector lies in the span of the sublattice")
    return qm.lift(tuple(x // g for x in q))


def primitive_generator_toward(face: Sublattice, wall: Sublattice,
                               direction: Sequence[Fraction | int]) -> IntVec:
    """Primitive generator of the rank-1 quotient ``face/wall``.

    Picks the sign so the generator points to the same side of ``wall`` as
    ``direction`` (a rational vector in the span of ``face``).  The result is
    an integer vector inside ``face``.
    """
    if face.rank != wall.rank + 1:
        raise LinalgError("face/wall ranks must differ by one")
    wall_coords = []
    for b in wall.basis:
        c = face.coords(b)
        if c is None or any(x.denominator != 1 for x in c):
            raise LinalgError("wall lattice not contained in face lattice")
        wall_coords.append(tuple(int(x) for x in c))
    d = face.coords(direction)
    if d is None:
        raise LinalgError("direction not in the span of the face")
    sub = Sublattice(face.rank, tuple(hermite_normal_form(wall_coords)))
    qm = quotient_map(sub)
    w = primitive_quotient_vector(scale_to_integer(d), sub)
    side_w = qm.coords(w)[0]
    side_d = qm.coords_q(d)[0]
    if (side_w > 0) != (side_d > 0):
        w = tuple(-x for x in w)
    out = [0] * face.ambient_rank
    for coef, brow in zip(w, face.basis, strict=True):
        for i, x in enumerate(brow):
            out[i] += coef * x
    return tuple(out)
