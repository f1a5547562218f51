"""Dense exact matrices over Q or the Laurent ring, and polynomial matrices.

:class:`Matrix` is an immutable rectangular matrix.  :class:`PolyMatrix` is a
square matrix over R[s], stored as the list of its coefficient matrices
(index = degree).  Norms follow the conventions used by the clearing
algorithm: :func:`sup_norm` is the entrywise maximum, while :func:`poly_norm`
ignores the degree-0 coefficient.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from . import ring as R
from .errors import InvalidToleranceError, NotAUnitError, ShapeError
from .poly import Poly
from .sturm import RootCounter


class Matrix:
    __slots__ = ("rows", "cols", "ring", "_e")

    def __init__(self, entries: Iterable[Iterable], ring: str | None = None):
        grid = [list(row) for row in entries]
        if not grid or not grid[0]:
            raise ShapeError("matrices must have at least one row and one column")
        width = len(grid[0])
        if any(len(row) != width for row in grid):
            raise ShapeError("ragged rows")
        if ring is None:
            ring = R.LAURENT if any(
                isinstance(x, R.LaurentElement) for row in grid for x in row
            ) else R.Q
        self.rows = len(grid)
        self.cols = width
        self.ring = ring
        self._e = tuple(tuple(R.coerce(x, ring) for x in row) for row in grid)

    @classmethod
    def _raw(cls, grid, ring) -> Matrix:
        m = cls.__new__(cls)
        m.rows = len(grid)
        m.cols = len(grid[0])
        m.ring = ring
        m._e = tuple(tuple(row) for row in grid)
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None, ring: str = R.Q) -> Matrix:
        cols = rows if cols is None else cols
        z = R.zero(ring)
        return cls._raw([[z] * cols for _ in range(rows)], ring)

    @classmethod
    def identity(cls, n: int, ring: str = R.Q) -> Matrix:
        z, o = R.zero(ring), R.one(ring)
        return cls._raw([[o if i == j else z for j in range(n)] for i in range(n)], ring)

    @classmethod
    def diag(cls, values: Sequence, ring: str = R.Q) -> Matrix:
        n = len(values)
        z = R.zero(ring)
        return cls._raw(
            [[R.coerce(values[i], ring) if i == j else z for j in range(n)] for i in range(n)],
            ring,
        )

    @classmethod
    def elementary(cls, n: int, i: int, j: int, x, ring: str = R.Q) -> Matrix:
        """Identity plus ``x`` in the off-diagonal position (i, j)."""
        if i == j:
            raise ValueError("elementary matrices are off-diagonal")
        grid = [list(row) for row in cls.identity(n, ring)._e]
        grid[i][j] = R.coerce(x, ring)
        return cls._raw(grid, ring)

    @classmethod
    def permutation(cls, order: Sequence[int]) -> Matrix:
        """P with P e_k = e_order[k], so that P^-1 A P = A[order][:, order]."""
        n = len(order)
        grid = [[Fraction(0)] * n for _ in range(n)]
        for k, idx in enumerate(order):
            grid[idx][k] = Fraction(1)
        return cls._raw(grid, R.Q)

    @classmethod
    def block(cls, blocks: Sequence[Sequence[Matrix]]) -> Matrix:
        ring = R.LAURENT if any(b.ring == R.LAURENT for row in blocks for b in row) else R.Q
        grid = []
        for brow in blocks:
            height = brow[0].rows
            if any(b.rows != height for b in brow):
                raise ShapeError("block row heights differ")
            for r in range(height):
                line = []
                for b in brow:
                    line.extend(R.coerce(x, ring) for x in b._e[r])
                grid.append(line)
        if any(len(line) != len(grid[0]) for line in grid):
            raise ShapeError("block column widths differ")
        return cls._raw(grid, ring)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def tolist(self) -> list[list]:
        return [list(row) for row in self._e]

    def __getitem__(self, idx):
        i, j = idx
        return self._e[i][j]

    def row(self, i: int) -> tuple:
        return self._e[i]

    def __iter__(self):
        return iter(self._e)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix._raw([[self._e[i][j] for j in cols] for i in rows], self.ring)

    def slice(self, r0: int, r1: int, c0: int, c1: int) -> Matrix:
        return Matrix._raw([row[c0:c1] for row in self._e[r0:r1]], self.ring)

    def _ring_with(self, other: Matrix) -> str:
        return R.LAURENT if R.LAURENT in (self.ring, other.ring) else R.Q

    def _promote(self, ring: str) -> tuple:
        if ring == self.ring:
            return self._e
        return tuple(tuple(R.coerce(x, ring) for x in row) for row in self._e)

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        ring = self._ring_with(other)
        a, b = self._promote(ring), other._promote(ring)
        return Matrix._raw([[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)], ring)

    def __neg__(self) -> Matrix:
        return Matrix._raw([[-x for x in row] for row in self._e], self.ring)

    def __sub__(self, other: Matrix) -> Matrix:
        return self + (-other)

    def scale(self, c) -> Matrix:
        ring = R.LAURENT if isinstance(c, R.LaurentElement) else self.ring
        c = R.coerce(c, ring)
        return Matrix._raw([[c * x for x in row] for row in self._promote(ring)], ring)

    def __mul__(self, c) -> Matrix:
        if isinstance(c, Matrix):
            return self @ c
        return self.scale(c)

    __rmul__ = scale

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        ring = self._ring_with(other)
        a, b = self._promote(ring), other._promote(ring)
        z = R.zero(ring)
        out = []
        for ra in a:
            acc = [z] * other.cols
            for k, x in enumerate(ra):
                if x == 0:
                    continue
                for j, y in enumerate(b[k]):
                    if y != 0:
                        acc[j] = acc[j] + x * y
            out.append(acc)
        return Matrix._raw(out, ring)

    def __pow__(self, e: int) -> Matrix:
        if not self.is_square:
            raise ShapeError("only square matrices have powers")
        if e < 0:
            return self.inverse() ** (-e)
        result = Matrix.identity(self.rows, self.ring)
        base = self
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    @property
    def T(self) -> Matrix:
        return Matrix._raw([list(col) for col in zip(*self._e)], self.ring)

    def trace(self):
        if not self.is_square:
            raise ShapeError("trace of a non-square matrix")
        acc = R.zero(self.ring)
        for i in range(self.rows):
            acc = acc + self._e[i][i]
        return acc

    def is_zero(self) -> bool:
        return all(x == 0 for row in self._e for x in row)

    def is_nonnegative(self) -> bool:
        R.require_ordered(self.ring, "sign test")
        return all(x >= 0 for row in self._e for x in row)

    def is_positive(self) -> bool:
        R.require_ordered(self.ring, "sign test")
        return all(x > 0 for row in self._e for x in row)

    def is_strictly_upper(self) -> bool:
        return all(
            self._e[i][j] == 0 for i in range(self.rows) for j in range(min(i + 1, self.cols))
        )

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._e == other._e

    def __hash__(self):
        return hash(self._e)

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self._e)
        return f"Matrix([{body}])"

    # -- linear algebra over Q ---------------------------------------------

    def rref(self) -> tuple[Matrix, list[int]]:
        R.require_ordered(self.ring, "row reduction")
        m = self.tolist()
        pivots = []
        r = 0
        for c in range(self.cols):
            pivot = next((i for i in range(r, self.rows) if m[i][c] != 0), None)
            if pivot is None:
                continue
            m[r], m[pivot] = m[pivot], m[r]
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return Matrix._raw(m, self.ring), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[Matrix]:
        """Basis of the right kernel as column vectors."""
        red, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for r, p in enumerate(pivots):
                v[p] = -red[r, f]
            basis.append(Matrix._raw([[x] for x in v], R.Q))
        return basis

    def inverse(self) -> Matrix:
        if not self.is_square:
            raise ShapeError("only square matrices are invertible")
        R.require_ordered(self.ring, "inversion")
        n = self.rows
        aug = Matrix.block([[self, Matrix.identity(n)]])
        red, pivots = aug.rref()
        if pivots[:n] != list(range(n)):
            raise NotAUnitError("matrix is singular")
        return red.slice(0, n, n, 2 * n)


def hstack(columns: Sequence[Matrix]) -> Matrix:
    return Matrix.block([list(columns)])


# -- norms ---------------------------------------------------------------------


def entrywise_abs(m: Matrix) -> Matrix:
    R.require_ordered(m.ring, "entrywise absolute value")
    return Matrix._raw([[abs(x) for x in row] for row in m], R.Q)


def sup_norm(m: Matrix) -> Fraction:
    R.require_ordered(m.ring, "sup norm")
    return max((abs(x) for row in m for x in row), default=Fraction(0))


# -- polynomial matrices -----------------------------------------------------


class PolyMatrix:
    """Square matrix over R[s] given by coefficient matrices ``coeffs[k]`` of s**k."""

    __slots__ = ("size", "ring", "coeffs")

    def __init__(self, coeffs: Sequence[Matrix], size: int | None = None, ring: str | None = None):
        coeffs = list(coeffs)
        if size is None:
            if not coeffs:
                raise ShapeError("size is required for an empty coefficient list")
            size = coeffs[0].rows
        if ring is None:
            ring = R.LAURENT if any(c.ring == R.LAURENT for c in coeffs) else R.Q
        for c in coeffs:
            if c.shape != (size, size):
                raise ShapeError(f"coefficient of shape {c.shape}, expected {(size, size)}")
        coeffs = [Matrix._raw(c._promote(ring), ring) for c in coeffs]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.size = size
        self.ring = ring
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, size: int, ring: str = R.Q) -> PolyMatrix:
        return cls([], size=size, ring=ring)

    @classmethod
    def constant(cls, m: Matrix) -> PolyMatrix:
        return cls([m], size=m.rows, ring=m.ring)

    @classmethod
    def from_entries(cls, grid: Sequence[Sequence[Poly]], ring: str = R.Q) -> PolyMatrix:
        n = len(grid)
        if any(len(row) != n for row in grid):
            raise ShapeError("polynomial matrix must be square")
        deg = max((p.degree for row in grid for p in row), default=-1)
        z = R.zero(ring)
        coeffs = []
        for k in range(deg + 1):
            coeffs.append(
                Matrix._raw(
                    [[R.coerce(p[k], ring) if k <= p.degree else z for p in row] for row in grid],
                    ring,
                )
            )
        return cls(coeffs, size=n, ring=ring)

    def coefficient(self, k: int) -> Matrix:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Matrix.zeros(self.size, self.size, self.ring)

    def entry(self, i: int, j: int) -> Poly:
        return Poly([c[i, j] for c in self.coeffs])

    def entries(self) -> list[list[Poly]]:
        return [[self.entry(i, j) for j in range(self.size)] for i in range(self.size)]

    @property
    def degree(self) -> int:
        """Maximum entry degree; 0 for the zero matrix."""
        return max(len(self.coeffs) - 1, 0)

    def lowest_degree(self) -> int | None:
        """Smallest k with a nonzero coefficient matrix, None for the zero matrix."""
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                return k
        return None

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        if self.size != other.size:
            raise ShapeError("size mismatch")
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyMatrix(
            [self.coefficient(k) + other.coefficient(k) for k in range(n)], size=self.size
        )

    def __neg__(self) -> PolyMatrix:
        return PolyMatrix([-c for c in self.coeffs], size=self.size, ring=self.ring)

    def __sub__(self, other: PolyMatrix) -> PolyMatrix:
        return self + (-other)

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.size != other.size:
            raise ShapeError("size mismatch")
        if self.is_zero() or other.is_zero():
            return PolyMatrix.zero(self.size, self.ring)
        out = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                p = a @ b
                out[i + j] = p if out[i + j] is None else out[i + j] + p
        return PolyMatrix(out, size=self.size)

    def scale(self, c) -> PolyMatrix:
        return PolyMatrix([m.scale(c) for m in self.coeffs], size=self.size)

    def shift(self, k: int) -> PolyMatrix:
        """Multiply by s**k."""
        if self.is_zero():
            return self
        z = Matrix.zeros(self.size, self.size, self.ring)
        return PolyMatrix([z] * k + list(self.coeffs), size=self.size, ring=self.ring)

    def identity_minus(self) -> list[list[Poly]]:
        """Entries of I - self as polynomials."""
        grid = [[-p for p in row] for row in self.entries()]
        for i in range(self.size):
            grid[i][i] = grid[i][i] + Poly([R.one(self.ring)])
        return grid

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.size == other.size and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.size, self.coeffs))

    def __repr__(self):
        return f"PolyMatrix(size={self.size}, degree={self.degree})"


def poly_norm(m: PolyMatrix) -> Fraction:
    """Largest absolute coefficient over strictly positive degrees."""
    R.require_ordered(m.ring, "polynomial norm")
    return max((sup_norm(c) for c in m.coeffs[1:]), default=Fraction(0))


def grid_poly_norm(grid: Sequence[Sequence[Poly]]) -> Fraction:
    """:func:`poly_norm` for a raw grid of polynomial entries."""
    best = Fraction(0)
    for row in grid:
        for p in row:
            for c in p.coeffs[1:]:
                if abs(c) > best:
                    best = abs(c)
    return best


def grid_degree(grid: Sequence[Sequence[Poly]]) -> int:
    return max((p.degree for row in grid for p in row), default=0) if grid else 0


# -- determinants and characteristic polynomials ---------------------------------


def _bareiss(grid: list[list], one, zero):
    n = len(grid)
    m = [list(row) for row in grid]
    sign = 1
    prev = one
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return zero
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev) if isinstance(num, Poly) else num / prev
            m[i][k] = zero
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign == 1 else -d


def _berkowitz(grid: list[list], one, zero) -> list:
    """Coefficients [1, c1, ..., cn] of det(xI - A), highest degree first.

    Division-free, so valid over any commutative ring.
    """
    n = len(grid)
    if n == 0:
        return [one]
    if n == 1:
        return [one, -grid[0][0]]
    a = grid[0][0]
    row = grid[0][1:]
    col = [grid[i][0] for i in range(1, n)]
    sub = [r[1:] for r in grid[1:]]
    items = [one, -a]
    vec = col
    for _ in range(n - 1):
        acc = zero
        for x, y in zip(row, vec):
            acc = acc + x * y
        items.append(-acc)
        vec = [sum((s * v for s, v in zip(srow, vec)), zero) for srow in sub]
    inner = _berkowitz(sub, one, zero)
    out = []
    for i in range(n + 1):
        acc = zero
        for j in range(n):
            if i >= j:
                acc = acc + items[i - j] * inner[j]
        out.append(acc)
    return out


def det_exact(m):
    """Exact determinant of a square Matrix or PolyMatrix.

    Over Q (and Q[s]) fraction-free Bareiss elimination is used; over the
    Laurent ring, where exact division is not available, the division-free
    Berkowitz recurrence is used instead.  PolyMatrix input returns a Poly.
    """
    if isinstance(m, PolyMatrix):
        return det_of_grid(m.entries(), m.ring)
    if not m.is_square:
        raise ShapeError("determinant of a non-square matrix")
    if m.ring == R.Q:
        return _bareiss(m.tolist(), Fraction(1), Fraction(0))
    coeffs = _berkowitz(m.tolist(), R.one(m.ring), R.zero(m.ring))
    return coeffs[-1] if m.rows % 2 == 0 else -coeffs[-1]


def det_of_grid(grid: Sequence[Sequence[Poly]], ring: str = R.Q) -> Poly:
    n = len(grid)
    if n == 0:
        return Poly([1])
    if ring == R.Q:
        return _bareiss([list(r) for r in grid], Poly([1]), Poly())
    coeffs = _berkowitz([list(r) for r in grid], Poly([1]), Poly())
    return coeffs[-1] if n % 2 == 0 else -coeffs[-1]


def char_poly(m: Matrix) -> Poly:
    """Monic characteristic polynomial det(xI - m), ascending coefficients."""
    if not m.is_square:
        raise ShapeError("characteristic polynomial of a non-square matrix")
    coeffs = _berkowitz(m.tolist(), R.one(m.ring), R.zero(m.ring))
    return Poly(list(reversed(coeffs)))


def power_sums(charpoly: Poly, n_max: int) -> list:
    """Traces of powers p_1..p_{n_max} of the roots, by Newton's identities.

    Uses only ring operations, so the result is exact for any coefficient ring.
    """
    if charpoly.is_zero() or charpoly.lead != 1:
        raise ValueError("power sums need a monic polynomial")
    m = charpoly.degree
    a = [charpoly[m - i] for i in range(m + 1)]
    zero = charpoly.lead * 0
    sums = []
    for k in range(1, n_max + 1):
        acc = -k * a[k] if k <= m else zero
        for i in range(1, min(k - 1, m) + 1):
            acc = acc - a[i] * sums[k - i - 1]
        sums.append(acc)
    return sums


def poly_from_power_sums(sums: Sequence[Fraction], degree: int) -> Poly:
    """Inverse Newton identities over Q: monic polynomial with given power sums."""
    a = [Fraction(1)]
    for k in range(1, degree + 1):
        acc = sums[k - 1]
        for i in range(1, k):
            acc += a[i] * sums[k - i - 1]
        a.append(-acc / k)
    return Poly(list(reversed(a)))


def is_nilpotent(m: Matrix) -> tuple[bool, int | None]:
    """(True, k) for the least k with m**k == 0, else (False, None)."""
    if not m.is_square:
        raise ShapeError("nilpotency of a non-square matrix")
    power = m
    for k in range(1, m.rows + 1):
        if power.is_zero():
            return True, k
        if k < m.rows:
            power = power @ m
    return False, None


def is_nilpotent_fast(m: Matrix) -> bool:
    """Nilpotency by repeated squaring; suited to large sparse companions."""
    power = m
    k = 1
    while k < m.rows:
        power = power @ power
        k *= 2
    return power.is_zero()


# -- spectral radius ------------------------------------------------------------


def _root_upper(value: Fraction, k: int, tol: Fraction) -> Fraction:
    """Rational u with u**k >= value and u - value**(1/k) <= tol (value >= 0)."""
    if value == 0:
        return Fraction(0)
    lo, hi = Fraction(0), max(Fraction(1), value)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        mid = Fraction(round(mid * 2**64), 2**64) if mid.denominator > 2**64 else mid
        if mid ** k >= value:
            hi = mid
        else:
            lo = mid
    return hi


def _round_up(x: Fraction, bits: int = 64) -> Fraction:
    """Positive dyadic rational >= x with a ``bits``-bit denominator."""
    scale = 1 << bits
    return Fraction(max(-((-x.numerator * scale) // x.denominator), 1), scale)


def spectral_radius_upper(m: Matrix, tol, max_iter: int = 2000) -> Fraction:
    """Certified upper bound ``u`` on the spectral radius with u - rho <= tol.

    Upper bounds come from two sources: the k-th root of the max row sum of
    m**k for k = 1, 2, 4, 8, 16 (bracketed by rational bisection), and the
    Collatz-Wielandt ratio max_i ((I+m)x)_i / x_i - 1 along the power
    iteration x <- (I+m)x.  Any positive x gives a valid bound, so x is
    rounded to short dyadic rationals between iterations.  The lower end is
    the largest real root of the characteristic polynomial, isolated with
    Sturm sequences; for a nonnegative matrix that root is the spectral
    radius.  If the iteration budget runs out, the upper end of the Sturm
    bracket is returned instead.
    """
    tol = R.to_rational(tol)
    if tol <= 0:
        raise InvalidToleranceError("tolerance must be positive")
    if not m.is_nonnegative():
        raise ValueError("spectral_radius_upper expects a nonnegative matrix")
    if m.is_zero():
        return Fraction(0)
    counter = RootCounter(char_poly(m))
    bracket = counter.largest_root_bracket(tol / 4)
    lower = max(bracket[0], Fraction(0)) if bracket else Fraction(0)
    best = None
    power, k = m, 1
    while k <= 16:
        candidate = _root_upper(max(sum(row, Fraction(0)) for row in power), k, tol / 4)
        best = candidate if best is None else min(best, candidate)
        if best - lower <= tol:
            return best
        power = power @ power
        k *= 2
    shifted = m + Matrix.identity(m.rows)
    x = [Fraction(1)] * m.rows
    for _ in range(max_iter):
        y = [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in shifted]
        best = min(best, max(yi / xi for yi, xi in zip(y, x)) - 1)
        if best - lower <= tol:
            return best
        top = max(y)
        x = [_round_up(yi / top) for yi in y]
    return bracket[1] if bracket else Fraction(0)
