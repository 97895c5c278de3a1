"""The mixed space V_2g(R) x H_g with the semidirect action of V_2g(Q) x| GSp_2g(Q)+."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import NamedTuple, Sequence

from .errors import NotRational
from .ratmat import RationalMatrix, as_matrix, gsp_multiplier, height
from .siegel import SiegelPoint, TOL_ACT, act, reduce_point

DEFAULT_LEVEL = 4


def is_rational_vector(v: Sequence) -> bool:
    return all(isinstance(x, (Fraction, int)) for x in v)


def _coerce_vector(v):
    out = []
    for x in v:
        if isinstance(x, str):
            x = Fraction(x)
        elif isinstance(x, int) and not isinstance(x, bool):
            x = Fraction(x)
        out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class MixedPoint:
    v: tuple
    Z: SiegelPoint

    def __post_init__(self):
        v = _coerce_vector(self.v)
        object.__setattr__(self, "v", v)
        if len(v) != 2 * self.Z.g:
            raise ValueError("v must have length 2g")

    @property
    def g(self) -> int:
        return self.Z.g

    @property
    def rational(self) -> bool:
        return is_rational_vector(self.v)

    def to_json(self) -> dict:
        if self.rational:
            v = [str(x) for x in self.v]
        else:
            v = [float(x) for x in self.v]
        return {"v": v, "Z": self.Z.to_json(), "rational": self.rational}

    @classmethod
    def from_json(cls, obj: dict) -> "MixedPoint":
        Z = SiegelPoint.from_json(obj["Z"])
        if obj.get("rational", False):
            v = [Fraction(str(x)) for x in obj["v"]]
        else:
            v = [x if isinstance(x, str) else float(x) for x in obj["v"]]
        return cls(tuple(v), Z)


@dataclass(frozen=True)
class GroupElement:
    """(w, M) in V_2g(Q) x| GSp_2g(Q)+ with composition (w1, M1)(w2, M2) = (w1 + M1 w2, M1 M2)."""

    w: tuple
    M: RationalMatrix

    def __post_init__(self):
        object.__setattr__(self, "w", _coerce_vector(self.w))
        object.__setattr__(self, "M", as_matrix(self.M))
        if len(self.w) != self.M.rows:
            raise ValueError("w and M sizes disagree")

    @classmethod
    def identity(cls, g: int) -> "GroupElement":
        return cls((Fraction(0),) * (2 * g), RationalMatrix.identity(2 * g))

    @classmethod
    def translation(cls, w) -> "GroupElement":
        w = _coerce_vector(w)
        return cls(w, RationalMatrix.identity(len(w)))

    @classmethod
    def linear(cls, M) -> "GroupElement":
        M = as_matrix(M)
        return cls((Fraction(0),) * M.rows, M)

    def compose(self, other: "GroupElement") -> "GroupElement":
        Mw = self.M.apply(other.w)
        return GroupElement(tuple(a + b for a, b in zip(self.w, Mw)), self.M @ other.M)

    __matmul__ = compose

    def inverse(self) -> "GroupElement":
        Mi = self.M.inverse()
        return GroupElement(tuple(-x for x in Mi.apply(self.w)), Mi)

    @property
    def multiplier(self) -> Fraction:
        return gsp_multiplier(self.M)

    def height_data(self):
        return list(self.w) + list(self.M.entries)

    def height(self) -> int:
        return height(self)

    def to_json(self) -> dict:
        return {"w": [str(x) for x in self.w], "M": [[str(x) for x in r] for r in self.M.tolist()]}


@dataclass(frozen=True)
class LevelStructure:
    N: int = DEFAULT_LEVEL

    def __post_init__(self):
        if self.N % 2 or self.N < 4:
            raise ValueError("level N must be even and at least 4")


class FReduction(NamedTuple):
    point: MixedPoint
    cert: GroupElement
    coset: tuple  # entries of the certificate's linear part mod N


def mixed_act(gel: GroupElement, p: MixedPoint, check: bool = True) -> MixedPoint:
    """(w, M)·(v, Z) = (w + M v, M Z)."""
    if gel.M.rows != 2 * p.g:
        raise ValueError("dimension mismatch")
    Mv = gel.M.apply(p.v)
    v = tuple(a + b for a, b in zip(gel.w, Mv))
    return MixedPoint(v, act(gel.M, p.Z, check=check))


def reduce_to_F(p: MixedPoint, level: LevelStructure | None = None, tol: float = TOL_ACT) -> FReduction:
    """Move p into [0, N)^{2g} x (reduced Siegel point) with a certificate in V(Q) x| Sp_2g(Z)."""
    level = level or LevelStructure()
    N = level.N
    fd = reduce_point(p.Z, tol)
    gamma = fd.gamma
    gv = gamma.apply(p.v)
    # float coordinates within tol of N wrap to 0 so drift cannot leave [0, N)
    shift = tuple(-N * math.floor(x / N if isinstance(x, Fraction) else (x + tol) / N) for x in gv)
    v = tuple(a + b for a, b in zip(gv, shift))
    cert = GroupElement(tuple(Fraction(s) for s in shift), gamma)
    coset = tuple(int(x) % N for x in gamma.entries)
    return FReduction(MixedPoint(v, fd.reduced), cert, coset)


def torsion_order(v: Sequence) -> int:
    """Order of v in R^{2g}/Z^{2g}: lcm of the reduced denominators."""
    if not is_rational_vector(v):
        raise NotRational("torsion order needs exact rational coordinates")
    d = 1
    for x in v:
        d = lcm(d, Fraction(x).denominator)
    return d


def vector_mod_one(v: Sequence) -> tuple:
    return tuple(Fraction(x) - math.floor(Fraction(x)) for x in v)


def point_residual(p: MixedPoint, q: MixedPoint) -> float:
    """Largest coordinate difference between two mixed points (v exact when both rational)."""
    dv = max((abs(float(a - b)) for a, b in zip(p.v, q.v)), default=0.0)
    return max(dv, p.Z.distance(q.Z))
