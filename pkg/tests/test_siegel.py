import cmath
import math
import random

import mpmath
import pytest
from hypothesis import given, strategies as st

from heckelab.errors import NotASimilitude, NumericalBreakdown
from heckelab.ratmat import RationalMatrix, gsp_multiplier
from heckelab.siegel import (S_MATRIX, T_MATRIX, SiegelPoint, act, in_fundamental_domain_g1,
                             random_siegel_point, random_symplectic, reduce_g1, reduce_siegel_approx,
                             same_class_g1)

R = RationalMatrix


def tau(z, **kw):
    return SiegelPoint.from_tau(z, **kw)


def hp_act(M, Z: SiegelPoint, dps=50):
    """(AZ+B)(CZ+D)^{-1} in mpmath at high precision, as an independent check."""
    g = Z.g
    with mpmath.workdps(dps):
        m = mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in r] for r in M.tolist()])
        z = mpmath.matrix([[mpmath.mpc(x, y) for x, y in zip(rx, ry)] for rx, ry in zip(Z.X, Z.Y)])
        A, B = m[:g, :g], m[:g, g:]
        C, D = m[g:, :g], m[g:, g:]
        W = (A * z + B) * (C * z + D) ** -1
        return [[complex(W[i, j]) for j in range(g)] for i in range(g)]


def hp_residual(M, Z, reduced):
    W = hp_act(M, Z)
    return max(abs(W[i][j] - reduced.Z[i][j]) for i in range(Z.g) for j in range(Z.g))


def test_point_validation():
    with pytest.raises(ValueError):
        SiegelPoint(2, [[0, 1], [0, 0]], [[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        SiegelPoint(2, [[0, 0], [0, 0]], [[1, 2], [2, 1]])
    with pytest.raises(ValueError):
        tau(1 - 1j)
    Z = SiegelPoint(2, [[0.1, 0.2], [0.2, 0.3]], [[2, 0.5], [0.5, 1]])
    assert SiegelPoint.from_json(Z.to_json()) == Z


def test_act_examples():
    Z = tau(0.3 + 1.7j)
    assert act(R.identity(2), Z).distance(Z) == 0
    assert act(S_MATRIX, tau(1j)).distance(tau(1j)) < 1e-15
    assert act(S_MATRIX, tau(2j)).distance(tau(0.5j)) < 1e-15
    with pytest.raises(NotASimilitude):
        act(R.diag([1, -1]), Z)


def test_act_compatibility(rng):
    for _ in range(50):
        g = rng.choice([1, 2])
        Z = random_siegel_point(g, rng, x_range=1.0)
        M = random_symplectic(g, rng, 4)
        N = R.diag([1] * g + [rng.randint(1, 5)] * g) @ random_symplectic(g, rng, 4)
        lhs = act(M, act(N, Z))
        rhs = act(M @ N, Z)
        assert lhs.distance(rhs) < 1e-9
        c = rng.randint(2, 9)
        assert act(R.identity(2 * g).scale(c), Z).distance(Z) < 1e-12


def test_reduce_g1_examples():
    fd = reduce_g1(tau(1j + 5))
    assert fd.gamma == T_MATRIX ** -5
    assert fd.reduced.distance(tau(1j)) < 1e-12
    fd = reduce_g1(tau(1j))
    assert fd.gamma == R.identity(2)
    fd = reduce_g1(tau(0.3 + 0.1j))
    t = fd.reduced.tau
    assert abs(t) >= 1 - 1e-12 and -0.5 <= t.real < 0.5
    assert hp_residual(fd.gamma, tau(0.3 + 0.1j), fd.reduced) < 1e-9


def test_fundamental_domain_predicate():
    assert in_fundamental_domain_g1(tau(2j))
    assert not in_fundamental_domain_g1(tau(0.6 + 2j))
    assert not in_fundamental_domain_g1(tau(cmath.exp(1j * math.pi / 3)))
    assert in_fundamental_domain_g1(tau(cmath.exp(2j * math.pi / 3)))
    assert in_fundamental_domain_g1(tau(-0.5 + 2j))
    assert not in_fundamental_domain_g1(tau(0.5 + 2j))


def test_boundary_conventions():
    rho = cmath.exp(1j * math.pi / 3)
    assert reduce_g1(tau(rho)).reduced.distance(tau(rho - 1)) < 1e-12
    assert reduce_g1(tau(0.5 + 3j)).reduced.distance(tau(-0.5 + 3j)) < 1e-12
    # on the unit circle the Re <= 0 copy is kept
    z = cmath.exp(1j * 1.2)
    assert reduce_g1(tau(z)).reduced.distance(tau(-z.conjugate())) < 1e-12
    assert same_class_g1(tau(rho), tau(rho - 1))


def test_small_imaginary_part():
    t = SiegelPoint(1, [[0.0]], [[1e-14]], tol_pd=1e-20)
    with pytest.raises(NumericalBreakdown):
        reduce_g1(t)


@given(st.floats(-20, 20), st.floats(0.01, 30))
def test_reduce_g1_sound_and_idempotent(x, y):
    t = tau(complex(x, y))
    fd = reduce_g1(t)
    assert gsp_multiplier(fd.gamma) == 1 and fd.gamma.is_integral()
    assert in_fundamental_domain_g1(fd.reduced)
    assert hp_residual(fd.gamma, t, fd.reduced) < 1e-9
    again = reduce_g1(fd.reduced)
    assert again.gamma in (R.identity(2), -R.identity(2))
    assert again.reduced.distance(fd.reduced) < 1e-9


def test_extended_precision_reduction():
    t = tau(mpmath.mpc("0.123456789012345678901234567890", "0.001"), dps=40)
    fd = reduce_g1(t)
    assert fd.reduced.dps == 40
    assert in_fundamental_domain_g1(fd.reduced)
    assert hp_residual(fd.gamma, t, fd.reduced) < 1e-20


def test_reduce_siegel_examples(rng):
    Z = SiegelPoint(2, [[0.1, 0.05], [0.05, -0.2]], [[1.2, 0.3], [0.3, 1.5]])
    fd = reduce_siegel_approx(Z)
    assert fd.gamma == R.identity(4)
    assert fd.reduced.distance(Z) < 1e-15
    W = SiegelPoint(2, [[1, 0], [0, 1]], [[1.5, 0.3], [0.3, 1.2]])
    fd = reduce_siegel_approx(W)
    assert all(abs(x) <= 0.5 + 1e-9 for r in fd.reduced.X for x in r)
    assert hp_residual(fd.gamma, W, fd.reduced) < 1e-9
    with pytest.raises(ValueError):
        reduce_siegel_approx(tau(1j))


def test_reduce_siegel_random(rng):
    for _ in range(40):
        g = rng.choice([2, 3])
        X = [[0.0] * g for _ in range(g)]
        for i in range(g):
            for j in range(i + 1):
                X[i][j] = X[j][i] = rng.uniform(-5, 5)
        Y = [[float(i == j) for j in range(g)] for i in range(g)]
        Z = SiegelPoint(g, X, Y)
        fd = reduce_siegel_approx(Z)
        assert gsp_multiplier(fd.gamma) == 1 and fd.gamma.is_integral()
        assert all(abs(x) <= 0.5 + 1e-9 for r in fd.reduced.X for x in r)
        assert abs(fd.reduced.Z[0][0]) >= 1 - 1e-9
        assert hp_residual(fd.gamma, Z, fd.reduced) < 1e-9
        assert fd.residual(Z) < 1e-9


def test_reduce_siegel_scrambled(rng):
    for _ in range(20):
        Z0 = random_siegel_point(2, rng)
        M = random_symplectic(2, rng, 5)
        Z = act(M, Z0)
        fd = reduce_siegel_approx(Z)
        assert hp_residual(fd.gamma, Z, fd.reduced) < 1e-9
        # reduced point has Y at least as large along e1 as the scrambled one
        assert fd.reduced.Y[0][0] >= min(Z.Y[0][0], 0.5)
