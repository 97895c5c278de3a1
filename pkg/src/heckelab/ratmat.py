"""Exact rational matrices, similitude multipliers, heights and integral normal forms.

Entries are :class:`fractions.Fraction`; nothing in this module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import NotASimilitude, Singular

Rational = Fraction


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class RationalMatrix:
    """Immutable dense matrix over Q, stored row-major."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, data: Sequence[Sequence]):
        data = [list(r) for r in data]
        if not data or not data[0]:
            raise ValueError("matrix must have at least one row and column")
        cols = len(data[0])
        if any(len(r) != cols for r in data):
            raise ValueError("ragged rows")
        self.rows = len(data)
        self.cols = cols
        self.entries = tuple(as_rational(x) for r in data for x in r)
        self._hash = None

    @classmethod
    def _raw(cls, rows: int, cols: int, entries: tuple) -> "RationalMatrix":
        m = cls.__new__(cls)
        m.rows, m.cols, m.entries, m._hash = rows, cols, entries, None
        return m

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._raw(n, n, tuple(one if i == j else zero for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RationalMatrix":
        cols = rows if cols is None else cols
        return cls._raw(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def diag(cls, values: Iterable) -> "RationalMatrix":
        values = [as_rational(v) for v in values]
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def blocks(cls, A, B, C, D) -> "RationalMatrix":
        """Assemble [[A, B], [C, D]] from four equally sized square blocks."""
        A, B, C, D = (x if isinstance(x, RationalMatrix) else RationalMatrix(x) for x in (A, B, C, D))
        top = [ra + rb for ra, rb in zip(A.tolist(), B.tolist())]
        bot = [rc + rd for rc, rd in zip(C.tolist(), D.tolist())]
        return cls(top + bot)

    # -- access -------------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols]

    def tolist(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def block(self, bi: int, bj: int) -> "RationalMatrix":
        """Quarter block (bi, bj) in {0,1}^2 of an even-sized square matrix."""
        g = self.rows // 2
        return RationalMatrix([[self[bi * g + i, bj * g + j] for j in range(g)] for i in range(g)])

    def abcd(self):
        return self.block(0, 0), self.block(0, 1), self.block(1, 0), self.block(1, 1)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.entries)

    def to_int_rows(self) -> list[list[int]]:
        if not self.is_integral():
            raise ValueError("matrix has non-integral entries")
        return [[int(x) for x in r] for r in self.tolist()]

    # -- arithmetic ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RationalMatrix._raw(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RationalMatrix._raw(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix._raw(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c) -> "RationalMatrix":
        c = as_rational(c)
        return RationalMatrix._raw(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __mul__(self, c):
        if isinstance(c, RationalMatrix):
            return self @ c
        return self.scale(c)

    __rmul__ = scale

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for c in cols:
                out.append(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)))
        return RationalMatrix._raw(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence) -> tuple:
        """Matrix times column vector; works for exact and float vectors alike."""
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(sum(a * x for a, x in zip(self.row(i), v)) for i in range(self.rows))

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix._raw(self.cols, self.rows,
                                   tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)))

    def __pow__(self, k: int) -> "RationalMatrix":
        if not self.is_square:
            raise ValueError("power of non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result, base = RationalMatrix.identity(self.rows), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    # -- elimination --------------------------------------------------------
    def det(self) -> Fraction:
        if not self.is_square:
            raise ValueError("determinant of non-square matrix")
        a = self.tolist()
        n = self.rows
        det = Fraction(1)
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c] != 0), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            piv = a[c][c]
            det *= piv
            for r in range(c + 1, n):
                f = a[r][c]
                if f:
                    f /= piv
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return det

    def inverse(self) -> "RationalMatrix":
        if not self.is_square:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        a = [r + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.tolist())]
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c] != 0), None)
            if p is None:
                raise Singular("matrix is singular")
            a[c], a[p] = a[p], a[c]
            piv = a[c][c]
            a[c] = [x / piv for x in a[c]]
            for r in range(n):
                if r != c and a[r][c]:
                    f = a[r][c]
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return RationalMatrix([r[n:] for r in a])

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"RationalMatrix([{body}])"


def as_matrix(m) -> RationalMatrix:
    return m if isinstance(m, RationalMatrix) else RationalMatrix(m)


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(map(as_rational, r)) for r in rows]
    if not a:
        return a, []
    m, n = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        a[r] = [x / piv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def nullspace(rows: list[list[Fraction]], n: int) -> list[tuple[Fraction, ...]]:
    """Basis of {x in Q^n : rows·x = 0}, one vector per free column."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    red, pivots = rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -red[i][f]
        basis.append(tuple(x))
    return basis


# -- symplectic similitudes ----------------------------------------------------

@dataclass(frozen=True)
class SymplecticForm:
    """The standard alternating form with Gram matrix [[0, I_g], [-I_g, 0]]."""

    g: int

    def __post_init__(self):
        if self.g < 1:
            raise ValueError("g must be positive")

    @cached_property
    def J(self) -> RationalMatrix:
        g = self.g
        return RationalMatrix([[(1 if j == i + g else -1 if i == j + g else 0) for j in range(2 * g)]
                               for i in range(2 * g)])

    def pair(self, v, w):
        """Psi(v, w) = v^t J w."""
        g = self.g
        return sum(v[i] * w[i + g] - v[i + g] * w[i] for i in range(g))


def symplectic_form(g: int) -> SymplecticForm:
    return SymplecticForm(g)


def gsp_multiplier(M, form: SymplecticForm | None = None) -> Fraction:
    """Return nu with M^t J M = nu J.

    Raises Singular for det M = 0 and NotASimilitude when M^t J M is not a
    scalar multiple of J.
    """
    M = as_matrix(M)
    if not M.is_square or M.rows % 2:
        raise ValueError("expected a 2g x 2g matrix")
    form = form or SymplecticForm(M.rows // 2)
    if form.g * 2 != M.rows:
        raise ValueError("form and matrix sizes disagree")
    if M.det() == 0:
        raise Singular("det M = 0")
    J = form.J
    P = M.T @ J @ M
    nu = P[0, form.g]
    if P != J.scale(nu):
        raise NotASimilitude("M^t J M is not a scalar multiple of J")
    return nu


def is_similitude(M, form: SymplecticForm | None = None) -> bool:
    try:
        gsp_multiplier(M, form)
    except (NotASimilitude, Singular):
        return False
    return True


# -- heights -------------------------------------------------------------------

def height(x) -> int:
    """Multiplicative height max(|p|, q), maximised over the entries of aggregates; H(0) = 1."""
    if isinstance(x, RationalMatrix):
        return max(height(e) for e in x.entries)
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        return max(abs(x.numerator), x.denominator)
    if isinstance(x, (list, tuple)):
        return max((height(e) for e in x), default=1)
    # GroupElement-like objects expose their rational data
    if hasattr(x, "height_data"):
        return max(height(e) for e in x.height_data())
    raise TypeError(f"no height for {type(x).__name__}")


# -- Hermite normal form -----------------------------------------------------------

def _int_hnf_rows(rows: list[list[int]], track: bool = False):
    """Row-style HNF of an integer matrix of arbitrary shape.

    Returns (H, U, rank) with H = U·rows, the nonzero rows of H on top with
    positive pivots and entries above each pivot reduced into [0, pivot).
    """
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def addmul(dst, src, k):
        # row[dst] -= k * row[src]
        a[dst] = [x - k * y for x, y in zip(a[dst], a[src])]
        if track:
            U[dst] = [x - k * y for x, y in zip(U[dst], U[src])]

    def negate(i):
        a[i] = [-x for x in a[i]]
        if track:
            U[i] = [-x for x in U[i]]

    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            swap(r, p)
            done = True
            for i in range(r + 1, m):
                if a[i][c]:
                    addmul(i, r, a[i][c] // a[r][c])
                    if a[i][c]:
                        done = False
            if done:
                break
        if all(a[i][c] == 0 for i in range(r, m)):
            continue
        if a[r][c] < 0:
            negate(r)
        for i in range(r):
            addmul(i, r, a[i][c] // a[r][c])
        pivots.append(c)
        r += 1
    return a, U, r


def hermite_normal_form(M) -> tuple[RationalMatrix, RationalMatrix]:
    """Upper triangular H = U·M with positive diagonal and 0 <= H[i][j] < H[j][j] for i < j."""
    M = as_matrix(M)
    if not M.is_square:
        raise ValueError("HNF is defined here for square matrices")
    if not M.is_integral():
        raise ValueError("HNF needs an integral matrix")
    if M.det() == 0:
        raise Singular("det M = 0")
    H, U, _ = _int_hnf_rows(M.to_int_rows(), track=True)
    return RationalMatrix(H), RationalMatrix(U)


def lattice_basis(vectors: list[Sequence[int]]) -> list[list[int]]:
    """Basis (HNF rows) of the Z-span of integer vectors."""
    if not vectors:
        return []
    H, _, rank = _int_hnf_rows([list(map(int, v)) for v in vectors])
    return H[:rank]


# -- isotypic pieces -----------------------------------------------------------------

def trivial_isotypic(gens: list, n: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of the common fixed space of all generators, i.e. the intersection of ker(g - I)."""
    gens = [as_matrix(g) for g in gens]
    if not gens:
        if n is None:
            raise ValueError("dimension needed when no generators are given")
        return nullspace([], n)
    size = gens[0].rows
    if any(not g.is_square or g.rows != size for g in gens):
        raise ValueError("generators must be square of equal size")
    I = RationalMatrix.identity(size)
    rows = [r for g in gens for r in (g - I).tolist()]
    return nullspace(rows, size)


def common_denominator(xs: Iterable) -> int:
    d = 1
    for x in xs:
        d = lcm(d, Fraction(x).denominator)
    return d


def primitive_integer_vector(v: Sequence) -> list[int]:
    """Scale a nonzero rational vector to a primitive integer vector."""
    d = common_denominator(v)
    w = [int(Fraction(x) * d) for x in v]
    g = 0
    for x in w:
        g = gcd(g, x)
    return [x // g for x in w] if g else w
