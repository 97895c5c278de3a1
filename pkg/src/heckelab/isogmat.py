"""Polarized isogenies as integral similitude matrices."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

from .ratmat import RationalMatrix, SymplecticForm, as_matrix, gsp_multiplier
from .siegel import TOL_ACT, SiegelPoint, act, reduce_g1, same_class_g1


@dataclass(frozen=True)
class PolarizedIsogenyMatrix:
    """Rational representation alpha of a polarized isogeny, with alpha^t J alpha = nu J."""

    alpha: RationalMatrix
    nu: int
    degree: int

    def __post_init__(self):
        alpha = as_matrix(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if not alpha.is_integral():
            raise ValueError("rational representation must be integral")
        nu = gsp_multiplier(alpha)
        if nu != self.nu or nu <= 0:
            raise ValueError(f"multiplier mismatch: alpha has nu = {nu}, declared {self.nu}")
        g = alpha.rows // 2
        if self.degree != self.nu ** g or alpha.det() != self.degree:
            raise ValueError("degree must equal nu^g = det(alpha)")

    @classmethod
    def from_alpha(cls, alpha) -> "PolarizedIsogenyMatrix":
        alpha = as_matrix(alpha)
        nu = gsp_multiplier(alpha)
        if nu.denominator != 1:
            raise ValueError("multiplier of an integral similitude must be an integer")
        nu = int(nu)
        return cls(alpha, nu, nu ** (alpha.rows // 2))

    @property
    def g(self) -> int:
        return self.alpha.rows // 2


def matrix_expression(iso: PolarizedIsogenyMatrix) -> RationalMatrix:
    """nu·(alpha^t)^{-1}; the matrix through which the isogeny acts on the uniformizing space."""
    return iso.alpha.T.inverse().scale(iso.nu)


def matrix_expression_via_J(alpha) -> RationalMatrix:
    """J alpha J^{-1}, equal to the matrix expression for every similitude."""
    alpha = as_matrix(alpha)
    J = SymplecticForm(alpha.rows // 2).J
    return J @ alpha @ J.inverse()


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


@lru_cache(maxsize=None)
def _hnf_g1(d: int) -> tuple:
    out = []
    for a in divisors(d):
        e = d // a
        for b in range(e):
            alpha = RationalMatrix([[a, b], [0, e]])
            out.append(PolarizedIsogenyMatrix(alpha, d, d))
    return tuple(out)


def enumerate_isogenies_g1(d: int) -> list[PolarizedIsogenyMatrix]:
    """All HNF representatives [[a, b], [0, d/a]], a | d, 0 <= b < d/a; there are sigma(d) of them.

    Listed lexicographically by (a, b).
    """
    if d < 1:
        raise ValueError("degree must be positive")
    return list(_hnf_g1(d))


def min_isogeny_degree_g1(tau_a: SiegelPoint, tau_t: SiegelPoint, d_max: int,
                          tol: float = TOL_ACT) -> int | None:
    """Smallest d <= d_max with a degree-d isogeny from the class of tau_a to the class of tau_t."""
    if tau_a.g != 1 or tau_t.g != 1:
        raise ValueError("g = 1 only")
    src = reduce_g1(tau_a, tol).reduced
    dst = reduce_g1(tau_t, tol).reduced
    for d in range(1, d_max + 1):
        for iso in enumerate_isogenies_g1(d):
            image = act(matrix_expression(iso), src, check=False)
            if same_class_g1(image, dst, tol):
                return d
    return None


# -- four-square quaternion blocks ----------------------------------------------------

def _two_squares(n: int):
    """Largest-first (a, b) with a^2 + b^2 = n, a >= b >= 0, or None."""
    for a in range(isqrt(n), -1, -1):
        r = n - a * a
        if r > a * a:
            return None
        b = isqrt(r)
        if b * b == r:
            return a, b
    return None


def four_squares(n: int) -> tuple[int, int, int, int]:
    """Lexicographically largest (a, b, c, d), a >= b >= c >= d >= 0, with a^2+b^2+c^2+d^2 = n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    for a in range(isqrt(n), -1, -1):
        r1 = n - a * a
        if r1 > 3 * a * a:
            break
        for b in range(min(a, isqrt(r1)), -1, -1):
            r2 = r1 - b * b
            if r2 > 2 * b * b:
                break
            cd = _two_squares(r2)
            if cd is not None and cd[0] <= b:
                return a, b, cd[0], cd[1]
    raise AssertionError(f"no four-square decomposition found for {n}")


def quaternion_matrix(a: int, b: int, c: int, d: int) -> RationalMatrix:
    """Multiplication by a + bi + cj + dk on the basis (1, i, j, k); columns are orthogonal of norm n."""
    return RationalMatrix([[a, -b, -c, -d],
                           [b, a, d, -c],
                           [c, -d, a, b],
                           [d, c, -b, a]])


def quaternion_block(a: int, b: int, c: int, d: int, g: int) -> RationalMatrix:
    """H ⊗ I_{2g}, an 8g x 8g matrix with Q^t Q = (a^2+b^2+c^2+d^2) I."""
    H = quaternion_matrix(a, b, c, d)
    n = 2 * g
    rows = []
    for i in range(4):
        for k in range(n):
            rows.append([H[i, j] if k == l else 0 for j in range(4) for l in range(n)])
    return RationalMatrix(rows)


def random_integral_similitude(g: int, rng, nu_max: int = 12, bound: int = 1000, length: int = 4):
    """gamma1 · diag(I, nu·I) · gamma2 with random symplectic gammas; entries bounded by ``bound``."""
    from .siegel import random_symplectic
    while True:
        nu = rng.randint(1, nu_max)
        D = RationalMatrix.diag([1] * g + [nu] * g)
        alpha = random_symplectic(g, rng, length) @ D @ random_symplectic(g, rng, length)
        if max(abs(x) for x in alpha.entries) <= bound:
            return PolarizedIsogenyMatrix(alpha, nu, nu ** g)
