import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from heckelab.errors import InsufficientSamples
from heckelab.mixeduni import MixedPoint
from heckelab.siegel import SiegelPoint
from heckelab.wspecial import WeaklySpecialFiberData, fiber_membership, torsion_section_test_g1

LINE = WeaklySpecialFiberData(1, [(1, 0)], (0, F(1, 2)), (0, 0))


def test_membership_examples():
    d = WeaklySpecialFiberData(2, [(1, 1, 0, 0)], (F(1, 3), 0, 0, F(1, 5)), (0.1, 0.2, 0.0, 0.0))
    p = tuple(float(a) + b for a, b in zip(d.v0, d.v))
    assert fiber_membership(p, d)
    assert fiber_membership((0.73, F(1, 2)), LINE)
    assert fiber_membership((F(73, 100), F(1, 2)), LINE)
    assert not fiber_membership((0.73, 0.25), LINE)
    assert not fiber_membership((F(73, 100), F(1, 4)), LINE)


def test_membership_skew_line():
    # span{(1, 2)} + Z^2 meets the second coordinate axis only at integers
    d = WeaklySpecialFiberData(1, [(1, 2)], (0, 0), (0, 0))
    assert fiber_membership((F(1, 2), 1), d)
    assert fiber_membership((F(1, 2), 0), d)        # (1/2, 1) - (0, 1)
    assert not fiber_membership((F(1, 4), 0), d)
    assert not fiber_membership((0, F(1, 3)), d)
    assert fiber_membership((F(1, 6), F(1, 3)), d)


def test_invalid_data():
    with pytest.raises(ValueError):
        WeaklySpecialFiberData(1, [(1, 0), (2, 0)], (0, 0), (0, 0))
    with pytest.raises(ValueError):
        WeaklySpecialFiberData(1, [(1, 0, 0)], (0, 0), (0, 0))


rat = st.fractions(min_value=-3, max_value=3, max_denominator=12)


@given(rat, rat, st.integers(-5, 5), st.integers(-5, 5), rat)
def test_lattice_translation_invariance(x, y, k1, k2, t):
    d = WeaklySpecialFiberData(1, [(1, 2)], (F(1, 3), 0), (0, 0))
    p = (x, y)
    q = (x + k1, y + k2)
    assert fiber_membership(p, d) == fiber_membership(q, d)
    on = (F(1, 3) + t, 2 * t)
    assert fiber_membership(on, d)


@given(rat, rat, rat, rat)
def test_empty_basis_is_congruence(x, y, a, b):
    d = WeaklySpecialFiberData(1, [], (a, b), (0, 0))
    expected = (x - a).denominator == 1 and (y - b).denominator == 1
    assert fiber_membership((x, y), d) == expected


def samples(fn, taus):
    return [MixedPoint(fn(t), SiegelPoint.from_tau(t)) for t in taus]


TAUS = [1j, 0.25 + 1j, 1 / 3 + 2j]


def test_section_examples():
    assert torsion_section_test_g1(samples(lambda t: (0, 0), TAUS), 50) == 1
    assert torsion_section_test_g1(samples(lambda t: (F(1, 2), F(1, 2)), TAUS), 50) == 2
    fn = lambda t: (t.real / (2 * t.imag), 0.0)
    # sampled values are 0, 1/8 and 1/12, so 24 clears every sample
    assert torsion_section_test_g1(samples(fn, TAUS), 50) == 24
    assert torsion_section_test_g1(samples(fn, TAUS), 20) is None
    irr = [math.sqrt(2) + 1j, 0.1 + 1j, 0.3 + 1.5j]
    assert torsion_section_test_g1(samples(fn, irr), 50) is None
    with pytest.raises(InsufficientSamples):
        torsion_section_test_g1(samples(fn, TAUS[:2]), 50)


@given(st.lists(st.tuples(rat, rat), min_size=3, max_size=5))
def test_section_order_divides(vs):
    pts = [MixedPoint(v, SiegelPoint.from_tau(1j + k)) for k, v in enumerate(vs)]
    m = torsion_section_test_g1(pts, 10**6)
    assert m is not None
    for mp in range(1, 3 * m + 1):
        if all((mp * x).denominator == 1 for v in vs for x in v):
            assert mp % m == 0
    floats = [MixedPoint(tuple(float(x) for x in v), p.Z) for v, p in zip(vs, pts)]
    if m <= 200:
        assert torsion_section_test_g1(floats, 200) == m
