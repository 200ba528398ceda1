import math
from fractions import Fraction

import pytest
from hypothesis import given

from deltoid_lab.scalars import FieldScalar, I, J, JBAR, ONE, ZERO, j_power

from conftest import field_scalars, nonzero_field_scalars


def test_constants():
    assert I * I == FieldScalar(Fraction(-1))
    r3 = FieldScalar(Fraction(0), Fraction(0), Fraction(1))
    assert r3 * r3 == FieldScalar(Fraction(3))
    assert J == FieldScalar(Fraction(-1, 2), Fraction(0), Fraction(0), Fraction(1, 2))


def test_j_is_cube_root_of_unity():
    assert J * J * J == ONE
    assert J * J == JBAR
    assert J.conj() == JBAR
    assert j_power(5) == JBAR
    assert j_power(-1) == JBAR


def test_conjugation_swaps_imaginary_components():
    x = FieldScalar(Fraction(1), Fraction(2), Fraction(3), Fraction(4))
    assert x.conj() == FieldScalar(Fraction(1), Fraction(-2), Fraction(3), Fraction(-4))
    assert x.conj().conj() == x


@given(field_scalars, field_scalars, field_scalars)
def test_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@given(nonzero_field_scalars)
def test_inverse(x):
    assert x * x.inverse() == ONE


@given(field_scalars, field_scalars)
def test_conjugation_is_multiplicative(x, y):
    assert (x * y).conj() == x.conj() * y.conj()


def test_to_complex_matches_components():
    x = FieldScalar(Fraction(1, 2), Fraction(-1), Fraction(1, 3), Fraction(2))
    expected = complex(0.5 + math.sqrt(3) / 3, -1 + 2 * math.sqrt(3))
    assert abs(x.to_complex() - expected) < 1e-15


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_canonical_string():
    assert str(ZERO) == "0"
    assert str(ONE) == "1"
    assert str(J) == "-1/2+1/2*i*r3"
    assert str(FieldScalar(Fraction(3), Fraction(-1, 2))) == "3-1/2*i"
    assert str(I) == "i"
    assert str(-I) == "-i"


def test_rational_value_guard():
    assert FieldScalar(Fraction(7, 3)).rational_value() == Fraction(7, 3)
    with pytest.raises(ValueError):
        I.rational_value()
