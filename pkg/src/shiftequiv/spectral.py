"""Spectral conditions, primitivity and the primitive block assembly.

A spectrum is always carried by its monic polynomial prod(t - d_i), never by
a root list.  Traces of powers come from Newton's identities, net traces from
Moebius inversion, and the Perron-value test is decided with Sturm sequences.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from . import ring as R
from .errors import InvalidToleranceError, NonnegativityRiskError, PreconditionError, ShapeError
from .matrix import Matrix, char_poly, entrywise_abs, power_sums, poly_from_power_sums
from .poly import Poly, poly_gcd
from .sse import SSEChain, similarity_move
from .sturm import RootCounter

INTEGER = "integer"
DENSE = "dense"
MODES = (INTEGER, DENSE)
INDETERMINATE = "indeterminate"


def moebius(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError(f"Moebius function is defined for positive integers, got {n!r}")
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass(frozen=True)
class SpectrumDescriptor:
    """Nonzero spectrum encoded as a monic polynomial, ascending coefficients."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(R.to_rational(c) for c in self.coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if not coeffs or coeffs[-1] != 1:
            raise ValueError("spectrum polynomial must be monic")
        if coeffs[0] == 0:
            raise ValueError("zero is not allowed in a nonzero spectrum (constant term is 0)")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_roots(cls, roots: Sequence) -> SpectrumDescriptor:
        return cls(Poly.from_roots(roots).coeffs)

    @classmethod
    def of_matrix(cls, a: Matrix) -> SpectrumDescriptor:
        """Nonzero spectrum of a rational matrix (zero roots removed)."""
        p = char_poly(a)
        return cls(p.coeffs[p.lowest_degree():])

    @property
    def poly(self) -> Poly:
        return Poly(self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def _as_poly(delta) -> Poly:
    if isinstance(delta, SpectrumDescriptor):
        return delta.poly
    if isinstance(delta, Poly):
        return SpectrumDescriptor(delta.coeffs).poly
    return SpectrumDescriptor(tuple(delta)).poly


def trace_powers(delta, n_max: int) -> list[Fraction]:
    """tr(Delta^n) for n = 1..n_max."""
    p = _as_poly(delta)
    if p.degree == 0:
        return [Fraction(0)] * n_max
    return power_sums(p, n_max)


def net_traces(delta, n_max: int) -> list[Fraction]:
    sums = trace_powers(delta, n_max)
    return [sum((moebius(n // d) * sums[d - 1] for d in divisors(n)), Fraction(0)) for n in range(1, n_max + 1)]


def net_trace(delta, n: int) -> Fraction:
    if n < 1:
        raise ValueError("period must be positive")
    return net_traces(delta, n)[-1]


# -- Perron value ---------------------------------------------------------------


def _pair_product_poly(p: Poly) -> Poly:
    """Monic polynomial whose roots are z_i * z_j (i <= j) over roots z of p.

    Its power sums are (p_k^2 + p_2k) / 2.  For a complex root w the pair
    (w, conj w) contributes |w|^2, so every squared root modulus is a root.
    """
    m = p.degree
    d = m * (m + 1) // 2
    sums = power_sums(p, 2 * d)
    pair = [(sums[k - 1] ** 2 + sums[2 * k - 1]) / 2 for k in range(1, d + 1)]
    return poly_from_power_sums(pair, d)


def has_perron_value(delta, tol=Fraction(1, 10**6)):
    """True, False or ``"indeterminate"``.

    True iff there is a simple root rho > 0 with rho > |d| for every other
    root d.  ``tol`` bounds the bracket refinement; when the dominant root
    cannot be separated from another root modulus within it the verdict is
    indeterminate.
    """
    tol = R.to_rational(tol)
    if tol <= 0:
        raise InvalidToleranceError("tolerance must be positive")
    p = _as_poly(delta)
    if p.degree == 0:
        return False
    counter = RootCounter(p)
    bracket = counter.largest_root_bracket(tol)
    if bracket is None:
        return False
    a, b = bracket
    while a < 0 < b:
        a, b = counter.refine(a, b)
    if b <= 0:
        return False
    # rho must be a simple root of p
    g = poly_gcd(p, p.derivative())
    if g.degree > 0 and RootCounter(g).count(a, b) > 0:
        return False
    h = _pair_product_poly(p)
    hcount = RootCounter(h)
    while hcount.count(a * a, b * b) != 1:
        if b - a < tol:
            return INDETERMINATE
        a, b = counter.refine(a, b)
    if hcount.count(b * b, None) > 0:
        return False
    gh = poly_gcd(h, h.derivative())
    if gh.degree > 0 and RootCounter(gh).count(a * a, b * b) > 0:
        return False
    return True


@dataclass
class SpectralReport:
    mode: str
    perron: object
    perron_ok: bool
    coeffs_in_ring_ok: bool
    trace_conditions_ok: bool
    power_traces: list
    net_traces: list | None
    n_max: int
    k_max: int
    range_limited: bool = True
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.perron_ok and self.coeffs_in_ring_ok and self.trace_conditions_ok


def check_spectral_conditions(
    delta, mode: str = INTEGER, n_max: int = 12, k_max: int = 12, tol=Fraction(1, 10**6)
) -> SpectralReport:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if n_max < 1 or k_max < 1:
        raise ValueError("n_max and k_max must be positive")
    poly = _as_poly(delta)
    failures = []
    perron = has_perron_value(poly, tol)
    if perron is not True:
        failures.append("perron" if perron is False else "perron indeterminate")
    if mode == INTEGER:
        ring_ok = all(c.denominator == 1 for c in poly.coeffs)
        sums = trace_powers(poly, n_max)
        nets = net_traces(poly, n_max)
        bad = [n for n, v in enumerate(nets, 1) if v < 0]
        traces_ok = not bad
        if bad:
            failures.append(f"negative net trace at n={bad}")
    else:
        ring_ok = True
        nets = None
        sums = trace_powers(poly, n_max * k_max)
        traces_ok = True
        neg = [n for n in range(1, n_max + 1) if sums[n - 1] < 0]
        if neg:
            traces_ok = False
            failures.append(f"negative trace at n={neg}")
        for n in range(1, n_max + 1):
            if sums[n - 1] > 0:
                lost = [k for k in range(1, k_max + 1) if not sums[n * k - 1] > 0]
                if lost:
                    traces_ok = False
                    failures.append(f"tr(D^{n}) > 0 but tr(D^{n}k) <= 0 for k={lost}")
        sums = sums[:n_max]
    if not ring_ok:
        failures.append("coefficients not integral")
    return SpectralReport(
        mode=mode,
        perron=perron,
        perron_ok=perron is True,
        coeffs_in_ring_ok=ring_ok,
        trace_conditions_ok=traces_ok,
        power_traces=sums,
        net_traces=nets,
        n_max=n_max,
        k_max=k_max,
        failures=failures,
    )


# -- primitivity ----------------------------------------------------------------


@dataclass(frozen=True)
class PrimitivityCertificate:
    primitive: bool
    witness_power: int | None
    period: int | None
    strongly_connected: bool

    def __bool__(self):
        return self.primitive

    def to_json(self) -> dict:
        return {"primitive": self.primitive, "witness_power": self.witness_power, "period": self.period}


def _reach(adj: list[list[int]], start: int) -> list[int | None]:
    level: list[int | None] = [None] * len(adj)
    level[start] = 0
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if level[v] is None:
                level[v] = level[u] + 1
                queue.append(v)
    return level


def is_primitive(a: Matrix) -> PrimitivityCertificate:
    R.require_ordered(a.ring, "primitivity")
    if not a.is_square:
        raise ShapeError("primitivity needs a square matrix")
    if not a.is_nonnegative():
        raise PreconditionError("matrix has a negative entry", condition="nonnegative")
    n = a.rows
    adj = [[j for j in range(n) if a[i, j] != 0] for i in range(n)]
    radj = [[i for i in range(n) if a[i, j] != 0] for j in range(n)]
    level = _reach(adj, 0)
    if any(x is None for x in level) or any(x is None for x in _reach(radj, 0)):
        return PrimitivityCertificate(False, None, None, False)
    period = 0
    for u in range(n):
        for v in adj[u]:
            period = gcd(period, level[u] + 1 - level[v])
    if period != 1:
        return PrimitivityCertificate(False, None, period or None, True)
    pattern = np.array([[x != 0 for x in row] for row in a], dtype=np.int64)
    power, k = pattern.copy(), 1
    while not (power > 0).all():
        power = ((power @ pattern) > 0).astype(np.int64)
        k += 1
    if k > (n - 1) ** 2 + 1 or not (a**k).is_positive():
        raise AssertionError("primitivity witness failed exact verification")
    return PrimitivityCertificate(True, k, 1, True)


# -- primitive assembly ---------------------------------------------------------


@dataclass
class AssemblyResult:
    G: Matrix
    chain: SSEChain
    identities: dict
    certificate: PrimitivityCertificate

    @property
    def ok(self) -> bool:
        return all(self.identities.values()) and self.certificate.primitive


def primitive_assembly(c: Matrix, m0: Matrix, eps) -> AssemblyResult:
    """Build G from primitive C and a small M0 by two block conjugations.

    diag(C, M0) is conjugated to [[C, e(C - M0)], [0, M0]] and then to

        G = [[(1-e)C + e M0,  e(C - M0)],
             [(1-e)(C - M0),  eC + (1-e)M0]].

    Both conjugations are recomputed and returned as a two-step chain from
    diag(C, M0) to G.
    """
    eps = R.to_rational(eps)
    if not Fraction(1, 3) < eps < Fraction(2, 3):
        raise PreconditionError(f"eps = {eps} is outside (1/3, 2/3)", condition="eps", eps=eps)
    if not (c.is_square and c.shape == m0.shape):
        raise ShapeError(f"C {c.shape} and M0 {m0.shape} must be square of one size")
    R.require_ordered(c.ring, "primitive assembly")
    R.require_ordered(m0.ring, "primitive assembly")
    gap = c - entrywise_abs(m0).scale(3)
    if not gap.is_nonnegative():
        bad = [(i, j) for i in range(c.rows) for j in range(c.cols) if gap[i, j] < 0]
        raise NonnegativityRiskError("|3 M0| <= C fails entrywise", condition="dominance", entries=bad)
    cert_c = is_primitive(c)
    if not cert_c.primitive:
        raise PreconditionError("C is not primitive", condition="primitive", certificate=cert_c.to_json())
    n = c.rows
    eye, zero = Matrix.identity(n), Matrix.zeros(n)
    diff = c - m0
    start = Matrix.block([[c, zero], [zero, m0]])
    s1 = Matrix.block([[eye, -eye.scale(eps)], [zero, eye]])
    s1_inv = Matrix.block([[eye, eye.scale(eps)], [zero, eye]])
    s2 = Matrix.block([[eye, zero], [eye, eye]])
    s2_inv = Matrix.block([[eye, zero], [-eye, eye]])
    middle, step1 = similarity_move(start, s1_inv)
    g, step2 = similarity_move(middle, s2_inv)
    expected_middle = Matrix.block([[c, diff.scale(eps)], [zero, m0]])
    expected_g = Matrix.block(
        [
            [c.scale(1 - eps) + m0.scale(eps), diff.scale(eps)],
            [diff.scale(1 - eps), c.scale(eps) + m0.scale(1 - eps)],
        ]
    )
    big_eye = Matrix.identity(2 * n)
    identities = {
        "first_conjugation": s1 @ start @ s1_inv == expected_middle and middle == expected_middle,
        "second_conjugation": s2 @ middle @ s2_inv == expected_g and g == expected_g,
        "conjugators_inverse": s1 @ s1_inv == big_eye and s2 @ s2_inv == big_eye,
        "nonnegative": g.is_nonnegative(),
    }
    chain = SSEChain((start, middle, g), (step1, step2))
    return AssemblyResult(g, chain, identities, is_primitive(g))


# -- orbit counting -------------------------------------------------------------

MAX_PERIOD = 10


def count_least_period_points(a: Matrix, n: int) -> int:
    """Closed edge words of length n in the multigraph of ``a`` with least period n."""
    if not a.is_square:
        raise ShapeError("orbit counting needs a square matrix")
    R.require_ordered(a.ring, "orbit counting")
    if not all(x >= 0 and x.denominator == 1 for row in a for x in row):
        raise PreconditionError("entries must be nonnegative integers", condition="integer")
    if not 1 <= n <= MAX_PERIOD:
        raise PreconditionError(f"period must be in 1..{MAX_PERIOD}", condition="period", n=n)
    size = a.rows
    src, dst = [], []
    for i in range(size):
        for j in range(size):
            src += [i] * int(a[i, j])
            dst += [j] * int(a[i, j])
    if not src:
        return 0
    src_a, dst_a = np.array(src), np.array(dst)
    # edges grouped by source: src is already sorted
    out_deg = np.bincount(src_a, minlength=size)
    offset = np.concatenate(([0], np.cumsum(out_deg)[:-1]))
    proper = [d for d in divisors(n) if d < n]
    total = 0
    for e0 in range(len(src)):
        paths = np.array([[e0]], dtype=np.int32)
        for _ in range(n - 1):
            heads = dst_a[paths[:, -1]]
            counts = out_deg[heads]
            if counts.sum() == 0:
                paths = paths[:0]
                break
            rows = np.repeat(np.arange(len(paths)), counts)
            within = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
            nxt = np.repeat(offset[heads], counts) + within
            paths = np.column_stack((paths[rows], nxt.astype(np.int32)))
        closed = paths[dst_a[paths[:, -1]] == src_a[e0]]
        keep = np.ones(len(closed), dtype=bool)
        for d in proper:
            keep &= ~(closed == np.roll(closed, d, axis=1)).all(axis=1)
        total += int(keep.sum())
    return total
