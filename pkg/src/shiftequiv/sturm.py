"""Exact real-root counting and isolation over Q with Sturm sequences."""

from __future__ import annotations

from fractions import Fraction

from .poly import Poly, squarefree_part


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    seq.pop()
    return seq


def _variations(signs) -> int:
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def variations_at(seq: list[Poly], x) -> int:
    return _variations(_sign(q(x)) for q in seq)


def variations_at_infinity(seq: list[Poly], positive: bool = True) -> int:
    signs = []
    for q in seq:
        s = _sign(q.lead)
        if not positive and q.degree % 2:
            s = -s
        signs.append(s)
    return _variations(signs)


def cauchy_bound(p: Poly) -> Fraction:
    """Every complex root of ``p`` has modulus strictly below this value."""
    lead = abs(p.lead)
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0))


class RootCounter:
    """Counts distinct real roots of a polynomial in intervals.

    The polynomial is replaced by its square-free part, so multiplicities are
    not counted.
    """

    def __init__(self, p: Poly):
        self.poly = squarefree_part(p)
        self.seq = sturm_sequence(self.poly) if self.poly.degree > 0 else [self.poly]

    def is_root(self, x) -> bool:
        return self.poly.degree > 0 and self.poly(x) == 0

    def count(self, lo=None, hi=None) -> int:
        """Distinct roots in the half-open interval (lo, hi]; None means infinite."""
        if self.poly.degree <= 0:
            return 0
        v_lo = variations_at_infinity(self.seq, False) if lo is None else self._var(lo)
        v_hi = variations_at_infinity(self.seq, True) if hi is None else self._var(hi)
        return v_lo - v_hi

    def _var(self, x) -> int:
        return variations_at(self.seq, x)

    def largest_root_bracket(self, width) -> tuple[Fraction, Fraction] | None:
        """Bracket (lo, hi] holding the largest real root and no other root.

        Returns None when there is no real root.  The bracket width is at most
        ``width``.
        """
        if self.count() == 0:
            return None
        bound = cauchy_bound(self.poly)
        lo, hi = -bound, bound
        while True:
            if hi - lo <= width and self.count(lo, hi) == 1:
                return lo, hi
            mid = (lo + hi) / 2
            if self.count(mid, hi) >= 1:
                lo = mid
            else:
                hi = mid

    def refine(self, lo, hi) -> tuple[Fraction, Fraction]:
        """Halve an isolating bracket (lo, hi], keeping exactly one root inside."""
        mid = (lo + hi) / 2
        if self.count(lo, mid) == 1:
            return lo, mid
        return mid, hi
