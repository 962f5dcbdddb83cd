"""Exact rational and integer linear algebra over lattices.

Matrices are tuples of row tuples holding ``int`` or ``fractions.Fraction``.
Lattice points are always kept in ambient rational coordinates; a
:class:`LatticeSpec` converts to and from coordinates in a basis of N.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotInSpan

Vector = tuple
Matrix = tuple


def frac(x) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact coordinates")
    return Fraction(x)


def vec(xs: Iterable) -> Vector:
    return tuple(frac(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vec(r) for r in rows)


def transpose(m: Sequence[Sequence]) -> Matrix:
    return tuple(zip(*m)) if m else ()


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def is_integral(v: Iterable) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def primitive_int(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector on its ray."""
    v = [Fraction(x) for x in v]
    den = reduce(lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return tuple(ints)
    return tuple(i // g for i in ints)


def sign_normalize(v: Sequence) -> tuple:
    for x in v:
        if x != 0:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    if a == 0:
        return abs(b), 0, (1 if b >= 0 else -1)
    x0, x1, y0, y1 = 1, 0, 0, 1
    aa, bb = a, b
    while bb:
        q, r = divmod(aa, bb)
        aa, bb = bb, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if aa < 0:
        aa, x0, y0 = -aa, -x0, -y0
    return aa, x0, y0


def hermite_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ m == H``. ``H`` is in
    row echelon form with positive pivots, entries above each pivot reduced
    into ``[0, pivot)``, and zero rows last.
    """
    if not m or not m[0]:
        raise ValueError("hermite_normal_form needs a nonempty matrix")
    a = [[int(x) for x in row] for row in m]
    if any(Fraction(x) != int(x) for row in m for x in row):
        raise ValueError("hermite_normal_form needs an integer matrix")
    r, c = len(a), len(a[0])
    u = [list(row) for row in identity(r)]

    def combine(i, j, p, q, s, t):
        # (row_i, row_j) <- (p*row_i + q*row_j, s*row_i + t*row_j)
        for mtx in (a, u):
            ri, rj = mtx[i], mtx[j]
            mtx[i] = [p * x + q * y for x, y in zip(ri, rj)]
            mtx[j] = [s * x + t * y for x, y in zip(ri, rj)]

    row = 0
    for col in range(c):
        if row == r:
            break
        for i in range(row + 1, r):
            if a[i][col] != 0:
                x, y = a[row][col], a[i][col]
                g, p, q = _xgcd(x, y)
                combine(row, i, p, q, -y // g, x // g)
        piv = a[row][col]
        if piv == 0:
            continue
        if piv < 0:
            a[row] = [-x for x in a[row]]
            u[row] = [-x for x in u[row]]
            piv = -piv
        for i in range(row):
            q = a[i][col] // piv
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[row])]
                u[i] = [x - q * y for x, y in zip(u[i], u[row])]
        row += 1
    return tuple(map(tuple, a)), tuple(map(tuple, u))


def det(m: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise DimensionMismatch("determinant of a non-square matrix")
    a = [[Fraction(x) for x in row] for row in m]
    d = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            d = -d
        p = a[col][col]
        d *= p
        for i in range(col + 1, n):
            f = a[i][col] / p
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return d


def row_reduce(m: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    a = [[Fraction(x) for x in row] for row in m]
    if not a:
        return a, []
    r, c = len(a), len(a[0])
    pivots = []
    row = 0
    for col in range(c):
        piv = next((i for i in range(row, r) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        p = a[row][col]
        a[row] = [x / p for x in a[row]]
        for i in range(r):
            if i != row and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[row])]
        pivots.append(col)
        row += 1
        if row == r:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    return len(row_reduce(m)[1])


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> list[Vector]:
    """Rational basis of the right null space of ``m``."""
    if not m:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    rows, pivots = row_reduce(m)
    c = len(m[0])
    free = [j for j in range(c) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * c
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -rows[i][f]
        basis.append(tuple(v))
    return basis


def inverse(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    rows, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return tuple(tuple(row[n:]) for row in rows)


def solve(a: Sequence[Sequence], b: Sequence) -> Vector | None:
    """One exact solution of ``a x = b``, or None when inconsistent."""
    c = len(a[0])
    aug = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(a, b)]
    rows, pivots = row_reduce(aug)
    if c in pivots:
        return None
    x = [Fraction(0)] * c
    for i, p in enumerate(pivots):
        x[p] = rows[i][c]
    return tuple(x)


def _integer_rows(m: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in m:
        row = [Fraction(x) for x in row]
        den = reduce(lcm, (x.denominator for x in row), 1)
        out.append([int(x * den) for x in row])
    return out


def kernel_basis(m: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Lattice basis of ``ker(m) ∩ Z^cols`` in Hermite normal form.

    Each returned vector is primitive with its first nonzero entry positive.
    """
    a = _integer_rows(m)
    h, u = hermite_normal_form(transpose(a))
    kernel = [u[i] for i, row in enumerate(h) if not any(row)]
    if not kernel:
        return []
    hk, _ = hermite_normal_form(kernel)
    return [tuple(row) for row in hk if any(row)]


def express_in_basis(v: Sequence, basis: Sequence[Sequence]) -> Vector:
    """Exact coordinates ``c`` with ``sum(c_i * basis_i) == v``."""
    if not basis:
        if any(Fraction(x) != 0 for x in v):
            raise NotInSpan("nonzero vector against an empty basis")
        return ()
    if any(len(b) != len(v) for b in basis):
        raise DimensionMismatch("basis vectors and target differ in length")
    cols = transpose(basis)
    if rank(cols) != len(basis):
        raise ValueError("basis vectors are linearly dependent")
    x = solve(cols, v)
    if x is None:
        raise NotInSpan(f"{tuple(map(str, v))} is not in the span of the basis")
    return x


@dataclass(frozen=True)
class LatticeSpec:
    """A full-rank lattice N in Q^n given by basis columns (ambient coordinates)."""

    basis: Matrix

    def __post_init__(self):
        b = mat(self.basis)
        if len(b) == 0 or any(len(r) != len(b) for r in b):
            raise DimensionMismatch("lattice basis must be square")
        if det(b) == 0:
            raise ValueError("lattice basis is singular")
        object.__setattr__(self, "basis", b)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @classmethod
    def standard(cls, n: int) -> "LatticeSpec":
        return cls(identity(n))

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence]) -> "LatticeSpec":
        """The lattice generated by rational vectors (must have full rank)."""
        gens = [vec(g) for g in gens]
        den = reduce(lcm, (x.denominator for g in gens for x in g), 1)
        h, _ = hermite_normal_form([[int(x * den) for x in g] for g in gens])
        rows = [r for r in h if any(r)]
        if len(rows) != len(gens[0]):
            raise ValueError("generators do not span a full-rank lattice")
        return cls(transpose([[Fraction(x, den) for x in r] for r in rows]))

    @property
    def generators(self) -> list[Vector]:
        return [tuple(c) for c in transpose(self.basis)]

    def coords(self, v: Sequence) -> Vector:
        """Coordinates of an ambient vector in the basis of N."""
        return matvec(self._inverse, vec(v))

    def ambient(self, c: Sequence) -> Vector:
        return matvec(self.basis, vec(c))

    def contains(self, v: Sequence) -> bool:
        return is_integral(self.coords(v))

    def primitive(self, v: Sequence) -> Vector:
        """The primitive lattice vector on the ray through ``v``."""
        return self.ambient(primitive_int(self.coords(v)))

    def dual(self) -> "LatticeSpec":
        """M = Hom(N, Z) with the standard pairing of ambient coordinates."""
        return LatticeSpec(transpose(self._inverse))

    def index_in(self, other: "LatticeSpec") -> Fraction:
        return abs(det(self.basis) / det(other.basis))

    def __eq__(self, other):
        if not isinstance(other, LatticeSpec):
            return NotImplemented
        return self.rank == other.rank and all(
            other.contains(g) for g in self.generators) and all(
            self.contains(g) for g in other.generators)

    def __hash__(self):
        return hash(self.rank)

    @property
    def _inverse(self) -> Matrix:
        inv = self.__dict__.get("_inv")
        if inv is None:
            inv = inverse(self.basis)
            object.__setattr__(self, "_inv", inv)
        return inv


def is_lattice_basis(vectors: Sequence[Sequence], lattice: LatticeSpec) -> bool:
    """True iff ``vectors`` generate N (unit determinant in N-coordinates)."""
    if len(vectors) != lattice.rank:
        raise DimensionMismatch(
            f"{len(vectors)} vectors given for a rank-{lattice.rank} lattice")
    coords = [lattice.coords(v) for v in vectors]
    if not all(is_integral(c) for c in coords):
        raise ValueError("vectors must be lattice points of N")
    return abs(det(coords)) == 1
