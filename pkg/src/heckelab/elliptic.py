"""Elliptic curves over Q: group law, naive and canonical heights, 2-isogenies, torsion."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import gmpy2

from .errors import KernelPoint, PrecisionLoss

MAX_DOUBLINGS = 16
BIT_BUDGET = 10**7
MAZUR_BOUND = 12


@dataclass(frozen=True)
class CurveQ:
    """y^2 = x^3 + a x + b (form 'short') or y^2 = x^3 + a x^2 + b x (form 'alternate')."""

    a: Fraction
    b: Fraction
    form: str = "short"

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.form not in ("short", "alternate"):
            raise ValueError("form must be 'short' or 'alternate'")
        if self.discriminant == 0:
            raise ValueError("singular curve")

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        """(a2, a4, a6) of y^2 = x^3 + a2 x^2 + a4 x + a6."""
        if self.form == "short":
            return Fraction(0), self.a, self.b
        return self.a, self.b, Fraction(0)

    @property
    def discriminant(self) -> Fraction:
        if self.form == "short":
            return -16 * (4 * self.a ** 3 + 27 * self.b ** 2)
        return 16 * self.b ** 2 * (self.a ** 2 - 4 * self.b)

    def rhs(self, x):
        a2, a4, a6 = self.coefficients
        return x ** 3 + a2 * x * x + a4 * x + a6

    def contains(self, P: "PointQ") -> bool:
        return P.is_infinity or P.y ** 2 == self.rhs(P.x)

    def to_json(self, points=()) -> dict:
        return {"a": str(self.a), "b": str(self.b), "form": self.form,
                "points": [P.to_json() for P in points]}

    @classmethod
    def from_json(cls, obj: dict):
        E = cls(Fraction(str(obj["a"])), Fraction(str(obj["b"])), obj.get("form", "short"))
        return E, [PointQ.from_json(p) for p in obj.get("points", [])]


@dataclass(frozen=True)
class PointQ:
    x: Fraction | None = None
    y: Fraction | None = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValueError("both coordinates or neither")
        if self.x is not None:
            object.__setattr__(self, "x", Fraction(self.x))
            object.__setattr__(self, "y", Fraction(self.y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def to_json(self):
        return "O" if self.is_infinity else {"x": str(self.x), "y": str(self.y)}

    @classmethod
    def from_json(cls, obj):
        if obj == "O":
            return INFINITY
        return cls(Fraction(str(obj["x"])), Fraction(str(obj["y"])))


INFINITY = PointQ()


def point_on(E: CurveQ, x, y) -> PointQ:
    P = PointQ(x, y)
    if not E.contains(P):
        raise ValueError(f"({x}, {y}) is not on the curve")
    return P


def neg(E: CurveQ, P: PointQ) -> PointQ:
    return P if P.is_infinity else PointQ(P.x, -P.y)


def add(E: CurveQ, P: PointQ, Q: PointQ) -> PointQ:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    a2, a4, _ = E.coefficients
    if P.x == Q.x:
        if P.y != Q.y or P.y == 0:
            return INFINITY
        lam = (3 * P.x ** 2 + 2 * a2 * P.x + a4) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - a2 - P.x - Q.x
    return PointQ(x3, -(P.y + lam * (x3 - P.x)))


def mul(E: CurveQ, m: int, P: PointQ) -> PointQ:
    if m < 0:
        return mul(E, -m, neg(E, P))
    R, D = INFINITY, P
    while m:
        if m & 1:
            R = add(E, R, D)
        D = add(E, D, D)
        m >>= 1
    return R


def torsion_order_ec(E: CurveQ, P: PointQ) -> int | None:
    """Smallest m <= 12 with mP = O; rational torsion never exceeds that order."""
    R = P
    for m in range(1, MAZUR_BOUND + 1):
        if R.is_infinity:
            return m
        R = add(E, R, P)
    return None


# -- heights ------------------------------------------------------------------------

def _log_max(p, q) -> float:
    m = max(abs(p), q)
    b = m.bit_length()
    if b > 60:
        return math.log(int(m >> (b - 60))) + (b - 60) * math.log(2)
    return math.log(int(m))


def naive_height(P: PointQ) -> float:
    if P.is_infinity:
        return 0.0
    return _log_max(gmpy2.mpz(P.x.numerator), gmpy2.mpz(P.x.denominator))


def _integral_model(E: CurveQ):
    """b-invariants of an integral model x -> u^2 x, for the x-only duplication map."""
    a2, a4, a6 = E.coefficients
    u = 1
    for c, k in ((a2, 2), (a4, 4), (a6, 6)):
        d = c.denominator
        # smallest u_c with u_c^k divisible by d
        uc = 1
        for pr, e in _factor(d).items():
            uc *= pr ** (-(-e // k))
        u = lcm(u, uc)
    A2, A4, A6 = (int(c * u ** k) for c, k in ((a2, 2), (a4, 4), (a6, 6)))
    b2, b4, b6 = 4 * A2, 2 * A4, 4 * A6
    b8 = 4 * A2 * A6 - A4 * A4
    return u, tuple(gmpy2.mpz(b) for b in (b2, b4, b6, b8))


def _factor(n: int) -> dict[int, int]:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _double_x(p, q, b):
    """x(2P) = (x^4 - b4 x^2 - 2 b6 x - b8) / (4x^3 + b2 x^2 + 2 b4 x + b6), homogeneously."""
    b2, b4, b6, b8 = b
    p2, q2 = p * p, q * q
    F = p2 * p2 - b4 * p2 * q2 - 2 * b6 * p * q2 * q - b8 * q2 * q2
    G = q * (4 * p2 * p + b2 * p2 * q + 2 * b4 * p * q2 + b6 * q2 * q)
    if G == 0:
        return F, G
    g = gmpy2.gcd(F, G)
    F, G = F // g, G // g
    if G < 0:
        F, G = -F, -G
    return F, G


def doubling_x_sequence(E: CurveQ, P: PointQ, n: int) -> list[Fraction | None]:
    """x(2^k P) for k = 0..n via the integer x-only map on the original model (None once O is hit)."""
    u, b = _integral_model(E)
    x = P.x * u * u
    p, q = gmpy2.mpz(x.numerator), gmpy2.mpz(x.denominator)
    out = []
    for _ in range(n + 1):
        if q == 0:
            out.append(None)
            continue
        out.append(Fraction(int(p), int(q)) / (u * u))
        p, q = _double_x(p, q, b)
    return out


@dataclass(frozen=True)
class HeightEstimate:
    value: float
    doublings: int
    tail_bound: float
    torsion: bool = False


def canonical_height_estimate(E: CurveQ, P: PointQ, tol: float = 1e-6, max_n: int = MAX_DOUBLINGS,
                              bit_budget: int = BIT_BUDGET) -> HeightEstimate:
    """Duplication limit 4^{-n} h(2^n P).

    Stops once K/(3·4^n) < tol, where K is the largest |h(2Q) - 4h(Q)| seen
    along the orbit; that quantity bounds the remaining tail of the limit.
    Points whose doublings reach O or repeat are torsion and get height 0.
    """
    if P.is_infinity:
        return HeightEstimate(0.0, 0, 0.0, True)
    if not E.contains(P):
        raise ValueError("point not on curve")
    u, b = _integral_model(E)
    x = P.x * u * u
    p, q = gmpy2.mpz(x.numerator), gmpy2.mpz(x.denominator)
    seen = set()
    h = _log_max(p, q)
    K = 0.0
    for n in range(max_n + 1):
        if p.bit_length() < 256:
            if (p, q) in seen:
                return HeightEstimate(0.0, n, 0.0, True)
            seen.add((p, q))
        if n >= 2 and K / (3 * 4 ** n) < tol:
            return HeightEstimate(h / 4 ** n, n, K / (3 * 4 ** n))
        if n == max_n:
            break
        p, q = _double_x(p, q, b)
        if q == 0:
            return HeightEstimate(0.0, n + 1, 0.0, True)
        if max(abs(p), q).bit_length() > bit_budget:
            raise PrecisionLoss(f"coordinates exceed {bit_budget} bits after {n + 1} doublings")
        h_next = _log_max(p, q)
        K = max(K, abs(h_next - 4 * h))
        h = h_next
    return HeightEstimate(h / 4 ** max_n, max_n, K / (3 * 4 ** max_n))


def canonical_height(E: CurveQ, P: PointQ, tol: float = 1e-6, max_n: int = MAX_DOUBLINGS,
                     bit_budget: int = BIT_BUDGET) -> float:
    return canonical_height_estimate(E, P, tol, max_n, bit_budget).value


# -- 2-isogenies --------------------------------------------------------------------------

def two_isogeny(E: CurveQ):
    """Isogeny with kernel {O, (0,0)} onto y^2 = x^3 - 2A x^2 + (A^2 - 4B) x."""
    if E.form != "alternate":
        raise ValueError("two_isogeny needs the alternate form y^2 = x^3 + A x^2 + B x")
    A, B = E.a, E.b
    if B == 0:
        raise ValueError("B must be nonzero")
    E2 = CurveQ(-2 * A, A * A - 4 * B, "alternate")

    def phi(P: PointQ) -> PointQ:
        if P.is_infinity or P.x == 0:
            warnings.warn("2-isogeny evaluated on its kernel", KernelPoint)
            return INFINITY
        x, y = P.x, P.y
        return PointQ(y * y / (x * x), y * (x * x - B) / (x * x))

    return E2, phi


def dual_two_isogeny(E: CurveQ):
    """The dual of two_isogeny(E), as a map from the codomain back to E."""
    E2, _ = two_isogeny(E)
    E3, psi = two_isogeny(E2)

    def phi_hat(P: PointQ) -> PointQ:
        R = psi(P)
        return R if R.is_infinity else PointQ(R.x / 4, R.y / 8)

    return E2, phi_hat


def isogeny_height_scaling_check(E: CurveQ, P: PointQ, tol: float = 1e-5, bit_budget: int = BIT_BUDGET) -> dict:
    """Compare h^(phi P) on the codomain with 2·h^(P); each side is estimated to tol/4."""
    E2, phi = two_isogeny(E)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", KernelPoint)
        image = phi(P)
    lhs = canonical_height(E2, image, tol / 4, bit_budget=bit_budget)
    rhs = 2 * canonical_height(E, P, tol / 4, bit_budget=bit_budget)
    diff = abs(lhs - rhs)
    return {"lhs": lhs, "rhs": rhs, "diff": diff, "pass": diff < tol}


def multiplication_height_check(E: CurveQ, P: PointQ, m: int = 2, tol: float = 1e-5,
                                bit_budget: int = BIT_BUDGET) -> dict:
    lhs = canonical_height(E, mul(E, m, P), tol / 4, bit_budget=bit_budget)
    rhs = m * m * canonical_height(E, P, tol / (4 * m * m), bit_budget=bit_budget)
    diff = abs(lhs - rhs)
    return {"lhs": lhs, "rhs": rhs, "diff": diff, "pass": diff < tol}
