"""Univariate polynomials with exact coefficients.

Coefficients are stored in ascending order of degree and the tuple is trimmed,
so the zero polynomial has an empty coefficient tuple.  Coefficients may be
Fractions or :class:`~shiftequiv.ring.LaurentElement` values; division and
gcd are only available over Q.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import zip_longest

from .ring import LaurentElement, Q, LAURENT, encode_scalar, decode_scalar, to_rational


def _is_zero(c) -> bool:
    return c == 0


def _normalize(c):
    if isinstance(c, LaurentElement):
        return c
    return to_rational(c)


class Poly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = [_normalize(c) for c in coeffs]
        while coeffs and _is_zero(coeffs[-1]):
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def monomial(cls, c, k: int) -> Poly:
        if _is_zero(c):
            return cls()
        return cls([c * 0] * k + [c])

    @classmethod
    def constant(cls, c) -> Poly:
        return cls([c])

    @classmethod
    def from_roots(cls, roots) -> Poly:
        p = cls([1])
        for r in roots:
            p = p * cls([-to_rational(r), 1])
        return p

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1]

    @property
    def ring(self) -> str:
        return LAURENT if any(isinstance(c, LaurentElement) for c in self.coeffs) else Q

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def lowest_degree(self) -> int:
        """Index of the first nonzero coefficient (-1 for zero)."""
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return i
        return -1

    @staticmethod
    def _lift(other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction, LaurentElement)) and not isinstance(other, bool):
            return Poly([other])
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return Poly(
            [a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0)]
        )

    __radd__ = __add__

    def __neg__(self):
        out = Poly()
        out.coeffs = tuple(-c for c in self.coeffs)
        return out

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                if _is_zero(b):
                    continue
                v = a * b
                out[i + j] = v if out[i + j] is None else out[i + j] + v
        zero = self.coeffs[0] * 0
        return Poly([zero if c is None else c for c in out])

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = Poly([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift(self, k: int) -> Poly:
        """Multiply by x**k."""
        if not self.coeffs:
            return Poly()
        out = Poly()
        out.coeffs = (self.coeffs[0] * 0,) * k + self.coeffs
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> Poly:
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> Poly:
        if not self.coeffs:
            return self
        lead = self.lead
        return Poly([c / lead for c in self.coeffs])

    def __divmod__(self, other: Poly):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lead
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] / lead
            if c:
                quot[k] = c
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return Poly(quot), Poly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> Poly:
        other = self._lift(other)
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if _is_zero(c):
                continue
            cs = str(c)
            if isinstance(c, LaurentElement) and len(c.terms) > 1:
                cs = f"({cs})"
            if k == 0:
                parts.append(cs)
            else:
                mono = "x" if k == 1 else f"x^{k}"
                parts.append(mono if cs == "1" else ("-" + mono if cs == "-1" else f"{cs}*{mono}"))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self})"

    def to_json(self):
        return [encode_scalar(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data, ring: str = Q) -> Poly:
        return cls([decode_scalar(c, ring) for c in data])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: Poly) -> Poly:
    if p.degree <= 0:
        return p.monic() if p else p
    return (p // poly_gcd(p, p.derivative())).monic()
