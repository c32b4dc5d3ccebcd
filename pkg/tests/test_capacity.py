from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dyncut import Cap

caps = st.builds(Cap, st.integers(-10**12, 10**12), st.integers(0, 40))


@given(caps)
def test_halve_double_roundtrip(c):
    assert c.halve().double() == c
    assert c.double().halve() == c


@given(caps, caps)
def test_arithmetic_matches_fractions(a, b):
    assert (a + b).as_fraction() == a.as_fraction() + b.as_fraction()
    assert (a - b).as_fraction() == a.as_fraction() - b.as_fraction()
    assert (a < b) == (a.as_fraction() < b.as_fraction())
    assert (a == b) == (a.as_fraction() == b.as_fraction())


@given(caps)
def test_halving_is_exact(c):
    assert c.halve().as_fraction() == c.as_fraction() / 2


def test_odd_numerator_halving_bumps_denominator():
    c = Cap(3, 0)
    assert c.halve() == Cap(3, 1)
    assert Cap(4, 0).halve() == Cap(2, 0)


@given(caps)
def test_normalized_representation(c):
    assert c.log2_den == 0 or c.num % 2 == 1
    if c.num == 0:
        assert c.log2_den == 0


@given(caps)
def test_decimal_string_is_exact(c):
    assert Fraction(c.decimal()) == c.as_fraction()


def test_from_fraction_rejects_non_dyadic():
    assert Cap.from_fraction(Fraction(3, 8)) == Cap(3, 3)
    with pytest.raises(ValueError):
        Cap.from_fraction(Fraction(1, 3))


def test_int_multiplication_and_negation():
    assert 3 * Cap(1, 1) == Cap(3, 1)
    assert -Cap(5, 2) == Cap(-5, 2)
    assert abs(Cap(-5, 2)) == Cap(5, 2)
