"""Fibre slices of weakly special subvarieties and the g = 1 torsion-section test."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InsufficientSamples
from .mixeduni import MixedPoint, is_rational_vector, torsion_order
from .ratmat import _int_hnf_rows, nullspace, primitive_integer_vector, rref

TOL = 1e-9


@dataclass(frozen=True)
class WeaklySpecialFiberData:
    """The coset v0 + v + span(basis) inside R^{2g}/Z^{2g}."""

    g: int
    V_N_basis: tuple
    v0: tuple
    v: tuple

    def __post_init__(self):
        n = 2 * self.g
        basis = tuple(tuple(Fraction(x) for x in b) for b in self.V_N_basis)
        object.__setattr__(self, "V_N_basis", basis)
        object.__setattr__(self, "v0", tuple(Fraction(x) for x in self.v0))
        object.__setattr__(self, "v", tuple(self.v))
        if any(len(b) != n for b in basis) or len(self.v0) != n or len(self.v) != n:
            raise ValueError("all vectors must have length 2g")
        if basis and len(rref([list(b) for b in basis])[1]) != len(basis):
            raise ValueError("basis vectors must be linearly independent")
        torsion_order(self.v0)

    def complement(self) -> list[list[int]]:
        """Integer rows P whose common kernel is span(basis)."""
        n = 2 * self.g
        if not self.V_N_basis:
            return [[int(i == j) for j in range(n)] for i in range(n)]
        return [primitive_integer_vector(r) for r in nullspace([list(b) for b in self.V_N_basis], n)]


def _frac_part(x):
    return x - round(x)


def fiber_membership(p: Sequence, data: WeaklySpecialFiberData, tol: float = TOL) -> bool:
    """Is p in v0 + v + span(basis) + Z^{2g}?

    With P the integer complement, this holds iff P·(p - v0 - v) lies in the
    lattice P·Z^{2g}; coordinates in an HNF basis of that lattice must be integral.
    """
    n = 2 * data.g
    if len(p) != n:
        raise ValueError("p must have length 2g")
    P = data.complement()
    if not P:
        return True
    exact = is_rational_vector(p) and is_rational_vector(data.v)
    if exact:
        q = [Fraction(a) - b - Fraction(c) for a, b, c in zip(p, data.v0, data.v)]
    else:
        q = [float(a) - float(b) - float(c) for a, b, c in zip(p, data.v0, data.v)]
    y = [sum(r[j] * q[j] for j in range(n)) for r in P]
    # lattice generated by the columns of P
    cols = [[P[i][j] for i in range(len(P))] for j in range(n)]
    H, _, rank = _int_hnf_rows(cols)
    basis = H[:rank]
    # solve y = sum c_k basis_k by back-substitution on the echelon form
    y = list(y)
    for row in basis:
        piv = next(j for j, x in enumerate(row) if x)
        c = y[piv] / row[piv]
        if exact:
            if Fraction(c).denominator != 1:
                return False
            c = int(c)
        else:
            if abs(_frac_part(c)) > tol:
                return False
            c = round(c)
        y = [a - c * b for a, b in zip(y, row)]
    if exact:
        return all(a == 0 for a in y)
    return all(abs(a) <= tol for a in y)


def torsion_section_test_g1(samples: Sequence[MixedPoint], M: int, tol: float = TOL) -> int | None:
    """Smallest m <= M with m·v(tau) in Z^2 for every sample, or None."""
    if len(samples) < 3:
        raise InsufficientSamples("at least three samples are needed")
    if any(s.g != 1 for s in samples):
        raise ValueError("g = 1 only")
    if all(s.rational for s in samples):
        m = 1
        for s in samples:
            m = np.lcm(m, torsion_order(s.v))
        return int(m) if m <= M else None
    vs = np.array([[float(x) for x in s.v] for s in samples])
    for m in range(1, M + 1):
        if np.all(np.abs(m * vs - np.round(m * vs)) <= tol):
            return m
    return None
