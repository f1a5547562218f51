from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shiftequiv import ring as R
from shiftequiv.errors import InvalidIntervalError, UnsupportedRingError
from shiftequiv.ring import LaurentElement, T, Z, ZINV, in_subring, interval_sample

rationals = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 1000)


def laurent(draw_terms):
    return LaurentElement({(a, b): Fraction(c) for a, b, c in draw_terms})


subring_terms = st.lists(
    st.tuples(st.sampled_from([0, 2, 3, 4, 5]), st.integers(-2, 2), st.integers(-3, 3).filter(bool)),
    max_size=4,
)


def test_rational_sum_is_canonical():
    x = R.to_rational("1/3") + R.to_rational("1/6")
    assert x == Fraction(1, 2)
    assert R.format_rational(x) == "1/2"


def test_additive_inverse():
    x = R.to_rational("-7/12")
    assert x + (-x) == 0


def test_format_always_has_slash():
    assert R.format_rational(3) == "3/1"
    assert R.format_rational(Fraction(-4, 6)) == "-2/3"


def test_to_rational_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        R.to_rational(0.5)
    with pytest.raises(TypeError):
        R.to_rational(True)


def test_laurent_distributivity():
    assert (1 - ZINV) * Z == Z - 1


def test_laurent_zero_terms_dropped():
    e = Z - Z
    assert e.is_zero() and e == 0 and e.terms == {}


def test_laurent_has_no_order():
    with pytest.raises(UnsupportedRingError):
        _ = Z < T
    with pytest.raises(UnsupportedRingError):
        abs(Z)


@pytest.mark.parametrize(
    "elt, expected",
    [((1 - ZINV) * T**2, True), (T, False), (LaurentElement.constant(1), True), (T**2 + T**3 * Z, True), (T * Z + T**2, False)],
)
def test_in_subring(elt, expected):
    assert in_subring(elt) is expected


def test_rationals_are_in_subring():
    assert in_subring(Fraction(3, 4))


@given(subring_terms, subring_terms)
def test_subring_closed(a, b):
    x, y = laurent(a), laurent(b)
    assert in_subring(x + y)
    assert in_subring(x * y)


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(subring_terms, subring_terms, subring_terms)
def test_laurent_ring_axioms(a, b, c):
    x, y, w = laurent(a), laurent(b), laurent(c)
    assert (x * y) * w == x * (y * w)
    assert x * (y + w) == x * y + x * w


def test_interval_sample_examples():
    assert interval_sample("1/3", "2/3") == Fraction(1, 2)
    assert interval_sample(0, "1/1000000") == Fraction(1, 2000000)
    with pytest.raises(InvalidIntervalError):
        interval_sample("2/3", "1/3")


@given(rationals, rationals)
def test_interval_sample_inside(a, b):
    if a == b:
        return
    lo, hi = min(a, b), max(a, b)
    assert lo < interval_sample(lo, hi) < hi


def test_scalar_json_round_trip():
    e = (1 - ZINV) * T**4 + 3
    data = R.encode_scalar(e)
    assert data == sorted(data, key=lambda r: (r["t"], r["z"]))
    assert R.decode_scalar(data, R.LAURENT) == e
    assert R.decode_scalar(R.encode_scalar(Fraction(-5, 3))) == Fraction(-5, 3)
    with pytest.raises(TypeError):
        R.decode_scalar(0.25)
