from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from shiftequiv.poly import Poly, poly_gcd, squarefree_part
from shiftequiv.sturm import RootCounter, cauchy_bound

x = sp.Symbol("x")
small_roots = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=1, max_size=5)


def to_sympy(p: Poly):
    return sum(sp.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(p.coeffs))


def test_degree_and_zero():
    assert Poly().degree == -1
    assert Poly([0, 0]).is_zero()
    assert Poly([1, 2, 0]).coeffs == (1, 2)


def test_divmod_matches_sympy():
    a = Poly([3, 0, -2, 5, 1])
    b = Poly([1, "1/2", 2])
    q, r = divmod(a, b)
    sq, sr = sp.div(to_sympy(a), to_sympy(b), x)
    assert sp.expand(to_sympy(q) - sq) == 0
    assert sp.expand(to_sympy(r) - sr) == 0


def test_exact_div_raises_when_inexact():
    with pytest.raises(ArithmeticError):
        Poly([1, 0, 1]).exact_div(Poly([1, 1]))


def test_gcd_and_squarefree():
    p = Poly.from_roots([1, 1, 2, -3])
    assert poly_gcd(p, p.derivative()) == Poly.from_roots([1])
    assert squarefree_part(p) == Poly.from_roots([1, 2, -3])


def test_evaluation():
    assert Poly([1, -3, 1])(Fraction(1, 2)) == Fraction(1, 4) - Fraction(3, 2) + 1


@given(small_roots)
@settings(max_examples=60, deadline=None)
def test_root_count_matches_distinct_roots(roots):
    p = Poly.from_roots(roots)
    counter = RootCounter(p)
    assert counter.count() == len(set(roots))
    assert counter.count(0, None) == len({r for r in roots if r > 0})
    assert counter.count(-1, 1) == len({r for r in roots if -1 < r <= 1})


@given(small_roots)
@settings(max_examples=60, deadline=None)
def test_largest_root_bracket(roots):
    counter = RootCounter(Poly.from_roots(roots))
    lo, hi = counter.largest_root_bracket(Fraction(1, 1000))
    assert lo < max(roots) <= hi and hi - lo <= Fraction(1, 1000)


def test_no_real_roots():
    counter = RootCounter(Poly([1, 0, 1]))
    assert counter.count() == 0
    assert counter.largest_root_bracket(Fraction(1, 10)) is None


def test_cauchy_bound_dominates_roots():
    p = Poly([-6, 11, -6, 1])
    assert cauchy_bound(p) > 3
