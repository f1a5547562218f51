"""Exact scalar rings.

Two coefficient rings are supported:

* ``Q`` -- rationals, represented by :class:`fractions.Fraction` (always in
  lowest terms with a positive denominator);
* ``Q[t2,t3,z,z-1]`` -- elements of the Laurent ring Q[t, z, 1/z], represented
  by :class:`LaurentElement`.  The subring Q[t^2, t^3, z, 1/z] is recognised
  by :func:`in_subring`.

Only ``Q`` is ordered; the Laurent ring supports ring operations and equality.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import InvalidIntervalError, UnsupportedRingError

Q = "Q"
LAURENT = "Q[t2,t3,z,z-1]"
RINGS = (Q, LAURENT)


def to_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a canonical Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not ring elements")
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_rational(x) -> str:
    x = to_rational(x)
    return f"{x.numerator}/{x.denominator}"


def interval_sample(lo, hi) -> Fraction:
    """Deterministic rational strictly inside the open interval (lo, hi)."""
    lo, hi = to_rational(lo), to_rational(hi)
    if lo >= hi:
        raise InvalidIntervalError(f"empty interval ({lo}, {hi})")
    return (lo + hi) / 2


class LaurentElement:
    """Element of Q[t, z, 1/z] stored as ``{(t_exp, z_exp): coefficient}``.

    Zero coefficients are never stored; the t exponent is nonnegative.
    Instances are immutable and hashable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for (a, b), c in items:
                a, b = int(a), int(b)
                if a < 0:
                    raise ValueError("negative t exponent")
                c = to_rational(c)
                if c:
                    c = clean.get((a, b), 0) + c
                    if c:
                        clean[(a, b)] = c
                    else:
                        clean.pop((a, b), None)
        self._terms = clean
        self._hash = None

    @classmethod
    def constant(cls, c) -> LaurentElement:
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, t_exp=0, z_exp=0, c=1) -> LaurentElement:
        return cls({(t_exp, z_exp): c})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def sorted_terms(self):
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @staticmethod
    def _coerce(other):
        if isinstance(other, LaurentElement):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return LaurentElement.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for key, c in other._terms.items():
            v = terms.get(key, 0) + c
            if v:
                terms[key] = v
            else:
                terms.pop(key, None)
        out = LaurentElement()
        out._terms = terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = LaurentElement()
        out._terms = {k: -c for k, c in self._terms.items()}
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms: dict = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                key = (a1 + a2, b1 + b2)
                v = terms.get(key, 0) + c1 * c2
                if v:
                    terms[key] = v
                else:
                    terms.pop(key, None)
        out = LaurentElement()
        out._terms = terms
        return out

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not ring operations")
        result = LaurentElement.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __abs__(self):
        raise UnsupportedRingError("the Laurent ring is not ordered")

    def __lt__(self, other):
        raise UnsupportedRingError("the Laurent ring is not ordered")

    __le__ = __gt__ = __ge__ = __lt__

    def __repr__(self):
        return f"LaurentElement({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (a, b), c in self.sorted_terms():
            mono = []
            if a:
                mono.append("t" if a == 1 else f"t^{a}")
            if b:
                mono.append("z" if b == 1 else f"z^{b}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(mono))
            elif c == -1:
                parts.append("-" + "*".join(mono))
            else:
                parts.append(f"{c}*" + "*".join(mono))
        return " + ".join(parts).replace("+ -", "- ")


T = LaurentElement.monomial(1, 0)
Z = LaurentElement.monomial(0, 1)
ZINV = LaurentElement.monomial(0, -1)


def in_subring(e) -> bool:
    """True iff ``e`` lies in Q[t^2, t^3, z, 1/z], i.e. no monomial has t-degree 1."""
    if isinstance(e, LaurentElement):
        return all(a != 1 for (a, _b) in e._terms)
    to_rational(e)
    return True


def ring_of(x) -> str:
    return LAURENT if isinstance(x, LaurentElement) else Q


def coerce(x, ring: str):
    if ring == Q:
        if isinstance(x, LaurentElement):
            if any(key != (0, 0) for key in x._terms):
                raise TypeError(f"{x} is not a rational")
            return x._terms.get((0, 0), Fraction(0))
        return to_rational(x)
    if ring == LAURENT:
        if isinstance(x, LaurentElement):
            return x
        return LaurentElement.constant(to_rational(x))
    raise ValueError(f"unknown ring {ring!r}")


def zero(ring: str):
    return Fraction(0) if ring == Q else LaurentElement()


def one(ring: str):
    return Fraction(1) if ring == Q else LaurentElement.constant(1)


def require_ordered(ring: str, what: str = "operation") -> None:
    if ring != Q:
        raise UnsupportedRingError(f"{what} needs an ordered ring, got {ring}")


def encode_scalar(x):
    """JSON encoding: ``"p/q"`` for rationals, a sorted term list for Laurent elements."""
    if isinstance(x, LaurentElement):
        return [
            {"t": a, "z": b, "c": format_rational(c)} for (a, b), c in x.sorted_terms()
        ]
    return format_rational(x)


def decode_scalar(data, ring: str = Q):
    if isinstance(data, list):
        elt = LaurentElement(
            [((rec["t"], rec["z"]), to_rational(rec["c"])) for rec in data]
        )
        return coerce(elt, ring)
    if isinstance(data, float):
        raise TypeError("floating-point scalars are not accepted; use 'p/q' strings")
    return coerce(to_rational(data), ring)
