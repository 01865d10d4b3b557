import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import elements_of, rationals, spaces
from rieszprob import (
    BandProjection,
    IncompatibleElementsError,
    Space,
    band_projection_of,
    e_norm,
    exp_neg,
    exp_neg_limit,
    functional_calculus,
    lattice_combine,
    multiply,
)


@pytest.fixture
def s2():
    return Space.uniform(2)


def test_join_meet_examples(s2):
    x, y = s2.element([1, -2]), s2.element([0, 3])
    assert lattice_combine(x, y, "join") == s2.element([1, 3])
    assert lattice_combine(x, x, "meet") == x
    assert (x | y) == s2.element([1, 3])
    assert (x & y) == s2.element([0, -2])


def test_positive_part_of_shifted(s2):
    f = s2.element([2, -1])
    assert (f - s2.unit()).pos() == s2.element([1, 0])


def test_abs_and_parts(s2):
    x = s2.element([F(-3, 2), 4])
    assert abs(x) == s2.element([F(3, 2), 4])
    assert x.pos() - x.neg() == x
    assert x.pos() + x.neg() == abs(x)


def test_unknown_kind(s2):
    with pytest.raises(ValueError):
        lattice_combine(s2.unit(), s2.unit(), "sup")


def test_mismatched_spaces():
    a, b = Space.uniform(2), Space([1, 2])
    with pytest.raises(IncompatibleElementsError):
        lattice_combine(a.unit(), b.unit(), "join")
    with pytest.raises(IncompatibleElementsError):
        multiply(a.unit(), b.unit())


def test_equal_spaces_interoperate():
    a, b = Space([1, 2]), Space([1, 2])
    assert (a.unit() + b.unit()) == a.constant(2)


def test_multiply_examples(s2):
    x = s2.element([2, 3])
    assert multiply(s2.unit(), x) == x
    assert multiply(x, s2.element([4, 5])) == s2.element([8, 15])


def test_band_indicator_is_idempotent_under_product():
    sp = Space.uniform(5)
    for bits in range(32):
        Pe = BandProjection(sp, [(bits >> i) & 1 for i in range(5)]).indicator()
        assert multiply(Pe, Pe) == Pe


def test_band_projection_of_examples():
    sp = Space.uniform(3)
    assert band_projection_of(sp.unit()) == BandProjection.identity(sp)
    assert band_projection_of(sp.zero()) == BandProjection.zero(sp)
    assert band_projection_of(sp.element([0, 3, 0])).mask.tolist() == [False, True, False]
    with pytest.raises(ValueError):
        band_projection_of(sp.element([0, -1, 2]))


def test_band_projection_float_tolerance():
    sp = Space.uniform(3, exact=False)
    P = band_projection_of(sp.element([1e-13, 1e-11, 0.0]))
    assert P.mask.tolist() == [False, True, False]


def test_e_norm_examples(s2):
    assert e_norm(s2.unit()) == 1
    assert e_norm(s2.element([-3, 2])) == 3
    assert e_norm(s2.zero()) == 0


def test_exact_space_rejects_floats(s2):
    with pytest.raises(TypeError):
        s2.element([0.5, 1])


def test_space_invariants():
    with pytest.raises(ValueError):
        Space([])
    with pytest.raises(ValueError):
        Space([1, 0])
    with pytest.raises(ValueError):
        Space([1, -2])


def test_elements_are_immutable(s2):
    x = s2.element([1, 2])
    with pytest.raises(ValueError):
        x.coords[0] = 5
    y = x + s2.unit()
    assert x == s2.element([1, 2]) and y == s2.element([2, 3])


def test_functional_calculus_examples():
    sp = Space.uniform(3)
    g = sp.element([F(1, 3), 0, 2])
    assert functional_calculus(lambda t: t, g) == g
    assert exp_neg(sp.zero()) == sp.unit()
    with pytest.raises(ValueError):
        functional_calculus(math.sqrt, sp.element([-1, 0, 1]), domain=(0, math.inf))


def test_exp_neg_limit_examples():
    sp = Space.uniform(2)
    for n in (1, 3, 10):
        assert exp_neg_limit(sp.zero(), n) == sp.unit()
    assert exp_neg_limit(sp.unit(), 1) == sp.zero()
    assert exp_neg_limit(sp.unit(), 2) == sp.constant(F(1, 4))
    with pytest.raises(ValueError):
        exp_neg_limit(sp.unit(), 0)


def test_exp_neg_limit_gap_at_100():
    # direct scalar evaluation is the oracle
    expected = abs((1 - 1 / 100) ** 100 - math.exp(-1))
    sp = Space.uniform(3, exact=False)
    gap = e_norm(exp_neg_limit(sp.unit(), 100) - exp_neg(sp.unit()))
    assert gap == pytest.approx(expected, rel=1e-12)
    assert gap <= math.e / 100


def test_exp_neg_limit_exact_matches_float():
    sp = Space.uniform(2)
    g = sp.element([F(1, 2), F(3, 4)])
    exact = exp_neg_limit(g, 16)
    approx = exp_neg_limit(g.approximate(), 16)
    assert np.allclose([float(c) for c in exact.coords], approx.coords, rtol=1e-14)


def test_exp_neg_limit_decreases_on_doubling():
    sp = Space.uniform(4, exact=False)
    g = sp.element([0.1, 0.5, 0.9, 1.0])
    gaps = [e_norm(exp_neg_limit(g, 2**k) - exp_neg(g)) for k in range(1, 13)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-4


@given(st.data())
def test_lattice_identity(data):
    sp = data.draw(spaces())
    x, y = data.draw(elements_of(sp)), data.draw(elements_of(sp))
    assert (x | y) + (x & y) == x + y


@given(st.data())
def test_f_algebra_laws(data):
    sp = data.draw(spaces())
    x, y, z = (data.draw(elements_of(sp)) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert sp.unit() * x == x
    if x.is_positive() and y.is_positive():
        assert (x * y).is_positive()


@given(st.data())
def test_projection_composition(data):
    sp = data.draw(spaces())
    m = sp.atom_count
    P = BandProjection(sp, data.draw(st.lists(st.booleans(), min_size=m, max_size=m)))
    Q = BandProjection(sp, data.draw(st.lists(st.booleans(), min_size=m, max_size=m)))
    x = data.draw(elements_of(sp))
    assert P(Q(x)) == (P * Q)(x)
    assert P(P(x)) == P(x)
    if x.is_positive():
        assert sp.zero() <= P(x) <= x


@given(st.data(), st.fractions(min_value=F(1, 10), max_value=5, max_denominator=10))
def test_shifted_band_is_positive_on_generator(data, eps):
    sp = data.draw(spaces())
    f = data.draw(elements_of(sp))
    shifted = f - sp.unit().scale(eps)
    P = band_projection_of(shifted.pos())
    assert P(shifted).is_positive()


@given(st.data())
def test_e_norm_is_least_bound(data):
    sp = data.draw(spaces())
    x = data.draw(elements_of(sp, rationals))
    lam = e_norm(x)
    assert abs(x) <= sp.unit().scale(lam)
    assert lam == 0 or not abs(x) <= sp.unit().scale(lam * F(99, 100))
