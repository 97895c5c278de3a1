"""Siegel upper half space, the GSp(R)+ action and fundamental-domain reduction.

Points carry hardware doubles by default.  Passing ``dps`` switches the entries
to mpmath multiprecision values; every routine here is written against plain
arithmetic operators so both representations go through the same code.
"""

from __future__ import annotations

import math
from contextlib import nullcontext
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import IterationLimit, NotASimilitude, NumericalBreakdown
from .ratmat import RationalMatrix, as_matrix, gsp_multiplier

TOL_SYM = 1e-9
TOL_ACT = 1e-9
TOL_PD = 1e-12
MAX_ITER = 10_000
COND_MAX = 1e12


def _precision(dps):
    return mpmath.workdps(dps) if dps else nullcontext()


def _real(x, dps):
    if dps:
        return mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)
    return float(x)


def _floor(x) -> int:
    return int(mpmath.floor(x)) if isinstance(x, mpmath.mpf) else math.floor(x)


def _round(x) -> int:
    return int(mpmath.nint(x)) if isinstance(x, mpmath.mpf) else round(x)


# -- small dense complex linear algebra -----------------------------------------

def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _matadd(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _norm1(A):
    return max(sum(abs(A[i][j]) for i in range(len(A))) for j in range(len(A[0])))


def _inverse(A):
    n = len(A)
    a = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(A)]
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(a[r][c]))
        if a[p][c] == 0:
            raise NumericalBreakdown("singular matrix in Siegel action")
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [r[n:] for r in a]


def _leading_minors(Y):
    """Leading principal minors via Gaussian elimination without pivoting."""
    n = len(Y)
    a = [list(r) for r in Y]
    minors = []
    det = 1
    for c in range(n):
        piv = a[c][c]
        det = det * piv
        minors.append(det)
        if piv == 0:
            return minors + [0] * (n - c - 1)
        for r in range(c + 1, n):
            f = a[r][c] / piv
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return minors


# -- points --------------------------------------------------------------------

@dataclass(frozen=True)
class SiegelPoint:
    """Z = X + iY with X, Y real symmetric g x g and Y positive definite."""

    g: int
    X: tuple
    Y: tuple
    dps: int | None = None
    tol_sym: float = field(default=TOL_SYM, compare=False, repr=False)
    tol_pd: float = field(default=TOL_PD, compare=False, repr=False)

    def __post_init__(self):
        with _precision(self.dps):
            X = tuple(tuple(_real(x, self.dps) for x in r) for r in self.X)
            Y = tuple(tuple(_real(y, self.dps) for y in r) for r in self.Y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        g = self.g
        if len(X) != g or len(Y) != g or any(len(r) != g for r in X + Y):
            raise ValueError("X and Y must be g x g")
        for M in (X, Y):
            for i in range(g):
                for j in range(i):
                    if abs(M[i][j] - M[j][i]) > self.tol_sym:
                        raise ValueError("X and Y must be symmetric")
        with _precision(self.dps):
            if any(m <= self.tol_pd for m in _leading_minors(Y)):
                raise ValueError("Y is not positive definite")

    @classmethod
    def from_tau(cls, tau, dps=None) -> "SiegelPoint":
        if dps:
            with _precision(dps):
                tau = mpmath.mpc(tau)
                return cls(1, ((tau.real,),), ((tau.imag,),), dps=dps)
        tau = complex(tau)
        return cls(1, ((tau.real,),), ((tau.imag,),))

    @classmethod
    def from_complex(cls, Z, dps=None) -> "SiegelPoint":
        g = len(Z)
        X = tuple(tuple(z.real for z in r) for r in Z)
        Y = tuple(tuple(z.imag for z in r) for r in Z)
        return cls(g, X, Y, dps=dps)

    @property
    def tau(self):
        if self.g != 1:
            raise ValueError("tau is only defined for g = 1")
        return self._cplx(self.X[0][0], self.Y[0][0])

    def _cplx(self, re, im):
        return mpmath.mpc(re, im) if self.dps else complex(re, im)

    @property
    def Z(self) -> list[list]:
        return [[self._cplx(x, y) for x, y in zip(rx, ry)] for rx, ry in zip(self.X, self.Y)]

    def distance(self, other: "SiegelPoint") -> float:
        """Largest absolute entry of Z - Z'."""
        if self.g != other.g:
            raise ValueError("genus mismatch")
        return float(max(abs(a - b) for ra, rb in zip(self.Z, other.Z) for a, b in zip(ra, rb)))

    def to_json(self) -> dict:
        return {"g": self.g, "X": [[float(x) for x in r] for r in self.X],
                "Y": [[float(y) for y in r] for r in self.Y]}

    @classmethod
    def from_json(cls, obj: dict, dps=None) -> "SiegelPoint":
        return cls(int(obj["g"]), obj["X"], obj["Y"], dps=dps)


@dataclass(frozen=True)
class FundDomainCertificate:
    gamma: RationalMatrix
    reduced: SiegelPoint

    def residual(self, original: SiegelPoint) -> float:
        return act(self.gamma, original).distance(self.reduced)


# -- the action --------------------------------------------------------------------

def act(M, Z: SiegelPoint, cond_max: float = COND_MAX, check: bool = True) -> SiegelPoint:
    """(AZ + B)(CZ + D)^{-1} for M = [[A, B], [C, D]] with positive multiplier."""
    M = as_matrix(M)
    if M.rows != 2 * Z.g:
        raise ValueError("matrix size does not match genus")
    if check and gsp_multiplier(M) <= 0:
        raise NotASimilitude("multiplier must be positive")
    g, dps = Z.g, Z.dps
    with _precision(dps):
        A, B, C, D = ([[_real(x, dps) for x in r] for r in blk.tolist()] for blk in M.abcd())
        z = Z.Z
        P = _matadd(_matmul(A, z), B)
        Q = _matadd(_matmul(C, z), D)
        Qi = _inverse(Q)
        if _norm1(Q) * _norm1(Qi) > cond_max:
            raise NumericalBreakdown("CZ + D is ill-conditioned")
        W = _matmul(P, Qi)
        X = [[(W[i][j].real + W[j][i].real) / 2 for j in range(g)] for i in range(g)]
        Y = [[(W[i][j].imag + W[j][i].imag) / 2 for j in range(g)] for i in range(g)]
        try:
            return SiegelPoint(g, X, Y, dps=dps, tol_sym=Z.tol_sym, tol_pd=Z.tol_pd)
        except ValueError as exc:
            raise NumericalBreakdown(str(exc)) from exc


# -- g = 1 ---------------------------------------------------------------------------

T_MATRIX = RationalMatrix([[1, 1], [0, 1]])
S_MATRIX = RationalMatrix([[0, -1], [1, 0]])


def reduce_g1(tau: SiegelPoint, tol: float = TOL_ACT, max_iter: int = MAX_ITER,
              tol_pd: float = TOL_PD) -> FundDomainCertificate:
    """Classical translate/invert reduction into -1/2 <= Re < 1/2, |tau| >= 1.

    On the unit circle the representative with Re <= 0 is kept.  ``tol``
    snaps values within tolerance of the boundary onto the canonical side.
    """
    if tau.g != 1:
        raise ValueError("reduce_g1 needs g = 1")
    if tau.Y[0][0] < tol_pd:
        raise NumericalBreakdown("Im tau below tolerance")
    # gamma kept as integer entries [[a, b], [c, d]]
    a, b, c, d = 1, 0, 0, 1
    with _precision(tau.dps):
        t = tau.tau
        for _ in range(max_iter):
            n = _floor(t.real + 0.5 + tol)
            if n:
                t = t - n
                a, b = a - n * c, b - n * d
            if abs(t) ** 2 < 1 - tol:
                t = -1 / t
                a, b, c, d = -c, -d, a, b
                continue
            break
        else:
            raise IterationLimit("reduce_g1 did not terminate")
        if abs(t) ** 2 <= 1 + tol and t.real > tol:
            t = -1 / t
            a, b, c, d = -c, -d, a, b
        gamma = RationalMatrix([[a, b], [c, d]])
        # recompute from the original point to avoid accumulated drift
        reduced = act(gamma, tau, check=False)
    return FundDomainCertificate(gamma, reduced)


def in_fundamental_domain_g1(tau: SiegelPoint, tol: float = TOL_ACT) -> bool:
    if tau.g != 1:
        raise ValueError("g = 1 only")
    t = tau.tau
    x, r2 = t.real, abs(t) ** 2
    if not (-0.5 - tol <= x < 0.5 - tol):
        return False
    if r2 < 1 - tol:
        return False
    if r2 <= 1 + tol and x > tol:
        return False
    return True


def near_boundary_g1(tau: SiegelPoint, margin: float) -> bool:
    t = tau.tau
    return abs(abs(t.real) - 0.5) < margin or abs(abs(t) ** 2 - 1) < margin


def same_class_g1(tau1: SiegelPoint, tau2: SiegelPoint, tol: float = TOL_ACT) -> bool:
    """Decide SL2(Z)-equivalence of two points by comparing reduced representatives.

    Points close to the boundary are compared against the boundary copies
    (tau -> tau +- 1 and tau -> -1/tau) as well.
    """
    r1 = reduce_g1(tau1, tol).reduced
    r2 = reduce_g1(tau2, tol).reduced
    t1, t2 = r1.tau, r2.tau
    if abs(t1 - t2) < tol:
        return True
    if near_boundary_g1(r2, 10 * tol) or near_boundary_g1(r1, 10 * tol):
        for cand in (t2 + 1, t2 - 1, -1 / t2, -1 / t2 + 1, -1 / t2 - 1):
            if abs(t1 - cand) < tol:
                return True
    return False


# -- g >= 2 ------------------------------------------------------------------------------

def _lll_gram(Y, delta=0.99, max_iter=MAX_ITER):
    """LLL on the Gram matrix Y; returns integer U with U Y U^t reduced."""
    n = len(Y)
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def gram(U):
        UY = [[sum(U[i][k] * Y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        return [[sum(UY[i][k] * U[j][k] for k in range(n)) for j in range(n)] for i in range(n)]

    def gso(G):
        mu = [[0.0] * n for _ in range(n)]
        B = [0.0] * n
        for i in range(n):
            for j in range(i):
                mu[i][j] = (G[i][j] - sum(mu[j][k] * mu[i][k] * B[k] for k in range(j))) / B[j]
            B[i] = G[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
        return mu, B

    k = 1
    for _ in range(max_iter):
        if k >= n:
            return U
        G = gram(U)
        mu, B = gso(G)
        for j in range(k - 1, -1, -1):
            q = _round(mu[k][j])
            if q:
                U[k] = [x - q * y for x, y in zip(U[k], U[j])]
                G = gram(U)
                mu, B = gso(G)
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            U[k], U[k - 1] = U[k - 1], U[k]
            k = max(k - 1, 1)
    raise IterationLimit("LLL did not terminate")


def _inversion_matrix(g: int) -> RationalMatrix:
    A = [[int(i == j and i > 0) for j in range(g)] for i in range(g)]
    B = [[-int(i == j == 0) for j in range(g)] for i in range(g)]
    C = [[int(i == j == 0) for j in range(g)] for i in range(g)]
    return RationalMatrix.blocks(A, B, C, A)


def reduce_siegel_approx(Z: SiegelPoint, tol: float = TOL_ACT, max_iter: int = MAX_ITER) -> FundDomainCertificate:
    """Lattice-reduce Y, translate X into [-1/2, 1/2], and invert while |z_11| < 1.

    The output is certified (gamma is exact integral symplectic) but is not
    claimed to lie in a canonical fundamental domain.
    """
    g = Z.g
    if g < 2:
        raise ValueError("reduce_siegel_approx is for g >= 2; use reduce_g1")
    gamma = RationalMatrix.identity(2 * g)
    cur = Z
    inv = _inversion_matrix(g)
    with _precision(Z.dps):
        for _ in range(max_iter):
            U = _lll_gram([list(r) for r in cur.Y])
            if any(U[i][j] != int(i == j) for i in range(g) for j in range(g)):
                Um = RationalMatrix(U)
                step = RationalMatrix.blocks(Um, RationalMatrix.zeros(g), RationalMatrix.zeros(g), Um.inverse().T)
                gamma = step @ gamma
                cur = act(step, cur, check=False)
            shift = [[-_round(x) for x in r] for r in cur.X]
            if any(any(r) for r in shift):
                I = RationalMatrix.identity(g)
                step = RationalMatrix.blocks(I, shift, RationalMatrix.zeros(g), I)
                gamma = step @ gamma
                cur = act(step, cur, check=False)
            if abs(cur.Z[0][0]) < 1 - tol:
                gamma = inv @ gamma
                cur = act(inv, cur, check=False)
                continue
            break
        else:
            raise IterationLimit("Siegel reduction exceeded max_iter")
        reduced = act(gamma, Z, check=False)
    return FundDomainCertificate(gamma, reduced)


def reduce_point(Z: SiegelPoint, tol: float = TOL_ACT, max_iter: int = MAX_ITER) -> FundDomainCertificate:
    return reduce_g1(Z, tol, max_iter) if Z.g == 1 else reduce_siegel_approx(Z, tol, max_iter)


def random_siegel_point(g: int, rng, x_range: float = 0.5, y_scale: float = 1.0) -> SiegelPoint:
    """Random symmetric X with entries in [-x_range, x_range] and Y = I + small symmetric noise."""
    X = [[0.0] * g for _ in range(g)]
    Y = [[0.0] * g for _ in range(g)]
    for i in range(g):
        for j in range(i + 1):
            X[i][j] = X[j][i] = rng.uniform(-x_range, x_range)
            noise = rng.uniform(-0.2, 0.2) / g
            Y[i][j] = Y[j][i] = y_scale * ((1.0 if i == j else 0.0) + noise)
    return SiegelPoint(g, X, Y)


def symplectic_generators(g: int) -> list[RationalMatrix]:
    """Generators of Sp_2g(Z): elementary translations, GL_g(Z) blocks and the inversion."""
    I = RationalMatrix.identity(g)
    O = RationalMatrix.zeros(g)
    gens = []
    for i in range(g):
        for j in range(i, g):
            B = [[int((a, b) in ((i, j), (j, i))) for b in range(g)] for a in range(g)]
            gens.append(RationalMatrix.blocks(I, B, O, I))
    for i in range(g):
        for j in range(g):
            if i != j:
                E = [[int(a == b) + int((a, b) == (i, j)) for b in range(g)] for a in range(g)]
                Em = RationalMatrix(E)
                gens.append(RationalMatrix.blocks(Em, O, O, Em.inverse().T))
    gens.append(RationalMatrix.blocks(O, -I, I, O))
    return gens


def random_symplectic(g: int, rng, length: int = 6) -> RationalMatrix:
    gens = symplectic_generators(g)
    M = RationalMatrix.identity(2 * g)
    for _ in range(length):
        G = rng.choice(gens)
        M = (G if rng.random() < 0.5 else G.inverse()) @ M
    return M
