"""Rational points of bounded height on exactly decidable planar sets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from ..errors import BudgetExceeded

CANDIDATE_BUDGET = 10**8


@dataclass(frozen=True)
class CountOracle:
    """Exact membership on the rectangle [x0, x1] x [y0, y1].

    ``approx`` is an optional vectorized float prefilter that must never
    reject a true member; survivors are always decided by ``membership``.
    """

    name: str
    membership: Callable[[Fraction, Fraction], bool]
    box: tuple[Fraction, Fraction, Fraction, Fraction]
    approx: Callable | None = None


def _parabola(x, y):
    return y == x * x


def _exp2(x: Fraction, y: Fraction) -> bool:
    # y = 2^(p/q)  <=>  y > 0 and y^q = 2^p
    if y <= 0:
        return False
    p, q = x.numerator, x.denominator
    return y ** q == Fraction(2) ** p


def _near(f):
    def approx(xs, ys):
        return np.abs(ys - f(xs)) <= 1e-9 * (1 + np.abs(ys))
    return approx


ORACLES = {
    "parabola": CountOracle("parabola", _parabola, (Fraction(0), Fraction(1), Fraction(0), Fraction(1)),
                            _near(lambda x: x * x)),
    "exp2": CountOracle("exp2", _exp2, (Fraction(0), Fraction(1), Fraction(0), Fraction(1)),
                        _near(np.exp2)),
    "box": CountOracle("box", lambda x, y: True, (Fraction(0), Fraction(1), Fraction(0), Fraction(1))),
}


def rationals_in(lo: Fraction, hi: Fraction, T: int) -> list[Fraction]:
    """Reduced p/q in [lo, hi] with max(|p|, q) <= T, sorted."""
    out = []
    for q in range(1, T + 1):
        p_lo = max(-T, math.ceil(lo * q))
        p_hi = min(T, math.floor(hi * q))
        for p in range(p_lo, p_hi + 1):
            if math.gcd(p, q) == 1:
                out.append(Fraction(p, q))
    return sorted(out)


def count_rational_points(oracle: CountOracle, T: int, budget: int = CANDIDATE_BUDGET,
                          return_points: bool = False):
    if T < 1:
        raise ValueError("T must be positive")
    x0, x1, y0, y1 = oracle.box
    xs = rationals_in(x0, x1, T)
    ys = rationals_in(y0, y1, T)
    if len(xs) * len(ys) > budget:
        raise BudgetExceeded(f"{len(xs) * len(ys)} candidate pairs exceed the budget of {budget}")
    found = []
    if oracle.approx is not None:
        xf = np.array([float(x) for x in xs])
        yf = np.array([float(y) for y in ys])
        for i, x in enumerate(xs):
            for j in np.nonzero(oracle.approx(xf[i], yf))[0]:
                if oracle.membership(x, ys[j]):
                    found.append((x, ys[j]))
    else:
        found = [(x, y) for x in xs for y in ys if oracle.membership(x, y)]
    return found if return_points else len(found)
