import json
import math
from fractions import Fraction as F

import pytest

from heckelab.elliptic import (INFINITY, CurveQ, PointQ, _integral_model, add,
                               canonical_height, canonical_height_estimate, doubling_x_sequence,
                               dual_two_isogeny, isogeny_height_scaling_check, mul,
                               multiplication_height_check, naive_height, neg, point_on,
                               torsion_order_ec, two_isogeny)
from heckelab.errors import KernelPoint, PrecisionLoss

E1 = CurveQ(-2, 0)                      # y^2 = x^3 - 2x
P1 = point_on(E1, -1, 1)
E_SQ = CurveQ(0, 17)                    # y^2 = x^3 + 17
ALT = CurveQ(0, -2, "alternate")


def frac_double_x(E, x):
    """x(2P) from the tangent-line formula with plain Fractions."""
    a2, a4, a6 = E.coefficients
    num = x ** 4 - 2 * a4 * x ** 2 - 8 * a6 * x + a4 * a4 - 4 * a2 * a6
    den = 4 * (x ** 3 + a2 * x * x + a4 * x + a6)
    return num / den


def test_group_law_examples():
    E = CurveQ(-2, 1)  # unrelated sanity curve; (1, 0) is 2-torsion
    T = point_on(E, 1, 0)
    assert add(E, T, T) == INFINITY
    E2 = CurveQ(0, -2, "short")  # y^2 = x^3 - 2
    P = point_on(E2, 3, 5)
    assert add(E2, P, P) == PointQ(F(129, 100), F(-383, 1000))
    assert add(E2, P, neg(E2, P)) == INFINITY
    assert add(E2, P, INFINITY) == P


def test_group_law_associative_and_on_curve():
    E2 = CurveQ(0, -2)
    P = point_on(E2, 3, 5)
    mults = [mul(E2, k, P) for k in range(1, 6)]
    for Q in mults:
        assert E2.contains(Q)
    for i, A in enumerate(mults[:3]):
        for B in mults[:3]:
            for C in mults[:2]:
                assert add(E2, add(E2, A, B), C) == add(E2, A, add(E2, B, C))
    assert mul(E2, 5, P) == add(E2, mul(E2, 2, P), mul(E2, 3, P))
    assert mul(E2, -2, P) == neg(E2, mul(E2, 2, P))


def test_alternate_form_group_law():
    E = CurveQ(1, 2, "alternate")       # y^2 = x^3 + x^2 + 2x
    P = point_on(E, 1, 2)
    Q = mul(E, 3, P)
    assert E.contains(Q) and E.contains(mul(E, 4, P))
    assert add(E, P, mul(E, 2, P)) == Q


def test_naive_height():
    assert naive_height(INFINITY) == 0.0
    assert naive_height(PointQ(F(129, 100), 0)) == pytest.approx(math.log(129))
    assert naive_height(PointQ(F(-3, 1000), 0)) == pytest.approx(math.log(1000))
    assert naive_height(PointQ(0, 0)) == 0.0
    big = F(2 ** 300 + 1, 3)
    assert naive_height(PointQ(big, 0)) == pytest.approx(300 * math.log(2), rel=1e-12)


def test_torsion_orders():
    assert torsion_order_ec(CurveQ(1, -1, "alternate"), point_on(CurveQ(1, -1, "alternate"), 0, 0)) == 2
    E = CurveQ(0, 1)                    # y^2 = x^3 + 1 has Z/6
    assert torsion_order_ec(E, point_on(E, 2, 3)) == 6
    assert torsion_order_ec(E, point_on(E, 0, 1)) == 3
    assert torsion_order_ec(E, point_on(E, -1, 0)) == 2
    assert torsion_order_ec(E1, P1) is None
    assert torsion_order_ec(E, INFINITY) == 1


def test_doubling_sequence_matches_fraction_route():
    for E, P in [(E1, P1), (CurveQ(0, -2), PointQ(3, 5)),
                 (CurveQ(1, 2, "alternate"), PointQ(1, 2))]:
        xs = doubling_x_sequence(E, P, 7)
        x = P.x
        for k in range(8):
            assert xs[k] == x
            x = frac_double_x(E, x)


def test_doubling_sequence_rational_model():
    E = CurveQ(0, F(-1, 32))            # scaled copy of y^2 = x^3 - 2 by u = 1/2
    P = point_on(E, F(3, 4), F(5, 8))
    xs = doubling_x_sequence(E, P, 5)
    x = P.x
    for k in range(6):
        assert xs[k] == x
        x = frac_double_x(E, x)
    assert _integral_model(E)[0] == 2


def test_height_reference_value():
    est = canonical_height_estimate(E1, P1, tol=1e-6)
    assert est.value == pytest.approx(0.60870888, abs=2e-6)
    assert est.tail_bound < 1e-6 and not est.torsion


def test_height_torsion_is_zero():
    E = CurveQ(0, 1)
    for P in [point_on(E, 2, 3), point_on(E, 0, 1), point_on(E, -1, 0), INFINITY]:
        est = canonical_height_estimate(E, P)
        assert est.value == 0.0 and est.torsion


def test_height_quadratic():
    E = CurveQ(0, -2)
    P = point_on(E, 3, 5)
    h = canonical_height(E, P, 3e-7)
    # the bit cost grows like 4^n h(mP), so large multiples get a looser tolerance
    for m in (2, 3):
        hm = canonical_height(E, mul(E, m, P), 1e-5)
        assert hm == pytest.approx(m * m * h, abs=1e-5 + m * m * 3e-7)
    chk = multiplication_height_check(E, P, 2, 1e-5)
    assert chk["pass"]


def test_height_model_invariance():
    h0 = canonical_height(CurveQ(0, -2), PointQ(3, 5), 1e-6)
    E = CurveQ(0, F(-1, 32))
    h1 = canonical_height(E, point_on(E, F(3, 4), F(5, 8)), 1e-6)
    assert h1 == pytest.approx(h0, abs=2e-6)


def test_height_tighter_tolerance_agrees():
    for E, P in [(E1, P1), (CurveQ(1, 2, "alternate"), PointQ(1, 2))]:
        a = canonical_height_estimate(E, P, 1e-5)
        b = canonical_height_estimate(E, P, 3e-7)
        assert b.doublings > a.doublings
        assert abs(a.value - b.value) <= a.tail_bound + b.tail_bound


def test_precision_loss():
    with pytest.raises(PrecisionLoss):
        canonical_height_estimate(E1, P1, tol=1e-12, bit_budget=64)
    with pytest.raises(ValueError):
        canonical_height(E1, PointQ(1, 1))


def test_two_isogeny_images_on_codomain():
    E2, phi = two_isogeny(ALT)
    assert (E2.a, E2.b) == (0, 8)
    P = point_on(ALT, -1, 1)
    for m in range(1, 5):
        Q = mul(ALT, m, P)
        assert E2.contains(phi(Q))
    with pytest.warns(KernelPoint):
        assert phi(PointQ(0, 0)) == INFINITY


def test_dual_composition_is_doubling():
    for a, b, x, y in [(0, -2, -1, 1), (1, 2, 1, 2), (-1, -3, -1, 1)]:
        E = CurveQ(a, b, "alternate")
        E2, phi = two_isogeny(E)
        _, phi_hat = dual_two_isogeny(E)
        P = point_on(E, x, y)
        for m in (1, 2, 3):
            Q = mul(E, m, P)
            R = phi_hat(phi(Q))
            assert R in (mul(E, 2, Q), neg(E, mul(E, 2, Q)))


def test_isogeny_height_scaling():
    out = isogeny_height_scaling_check(ALT, point_on(ALT, -1, 1), 1e-5)
    assert out["pass"] and out["diff"] < 1e-5
    assert out["lhs"] / (out["rhs"] / 2) == pytest.approx(2, abs=1e-5)


def test_json_round_trip():
    E = CurveQ(F(1, 3), F(-7, 2), "alternate")
    pts = [INFINITY, PointQ(0, 0)]
    obj = json.loads(json.dumps(E.to_json(pts)))
    E2, pts2 = CurveQ.from_json(obj)
    assert E2 == E and pts2 == pts


def test_invalid_curves():
    with pytest.raises(ValueError):
        CurveQ(0, 0)
    with pytest.raises(ValueError):
        CurveQ(2, 1, "alternate")       # A^2 = 4B
    with pytest.raises(ValueError):
        CurveQ(1, 1, "weierstrass")
