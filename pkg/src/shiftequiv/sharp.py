"""Block companions of polynomial matrices and elementary-operation logs.

A matrix ``A = sum_i t^i A_i`` over tR[t] has the companion

    [[A_1, A_2, ..., A_k],
     [ I,   0,  ...,  0 ],
     ...
     [ 0,  ...,  I,   0 ]]

and a square matrix ``A`` over R goes back to the pencil ``tA``.  Equivalence
of ``I - A`` and ``I - B`` under elementary operations over R[t] is certified
by an :class:`ElOpLog` which is replayed, never trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ring as R
from .errors import InvalidOpError, PreconditionError, ShapeError
from .matrix import Matrix, PolyMatrix, det_of_grid, is_nilpotent
from .poly import Poly
from .sse import SSEChain, nilpotent_extension_move, similarity_move

ROW_ADD = "row_add"
COL_ADD = "col_add"
STABILIZE = "stabilize"
DESTABILIZE = "destabilize"
OP_KINDS = (ROW_ADD, COL_ADD, STABILIZE, DESTABILIZE)


@dataclass(frozen=True)
class ElOp:
    """One elementary step on I - A.

    ``row_add``: row i += p * row j.  ``col_add``: column i += p * column j.
    ``stabilize`` appends a row and column meeting in a diagonal 1;
    ``destabilize`` removes them again and requires them to be identity-like.
    Indices are 0-based.
    """

    kind: str
    i: int | None = None
    j: int | None = None
    p: Poly | None = None

    def __post_init__(self):
        if self.kind not in OP_KINDS:
            raise InvalidOpError(f"unknown op kind {self.kind!r}")
        if self.kind in (ROW_ADD, COL_ADD):
            if self.i is None or self.j is None or self.p is None:
                raise InvalidOpError(f"{self.kind} needs i, j and p")
            if self.i == self.j:
                raise InvalidOpError("elementary operations are off-diagonal (i != j)")


@dataclass(frozen=True)
class ElOpLog:
    initial: PolyMatrix
    ops: tuple[ElOp, ...]
    final: PolyMatrix

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))


class OpRecorder:
    """Mutable working copy of I - A that records every operation applied."""

    def __init__(self, a: PolyMatrix):
        self.ring = a.ring
        self.grid = a.identity_minus()
        self.ops: list[ElOp] = []

    @property
    def size(self) -> int:
        return len(self.grid)

    def apply(self, op: ElOp, record: bool = True) -> None:
        g = self.grid
        n = len(g)
        if op.kind in (ROW_ADD, COL_ADD):
            if not (0 <= op.i < n and 0 <= op.j < n):
                raise InvalidOpError(f"index out of range for size {n}: {op}")
            if op.p.is_zero():
                return
            if op.kind == ROW_ADD:
                src = g[op.j]
                g[op.i] = [x + op.p * y for x, y in zip(g[op.i], src)]
            else:
                for row in g:
                    row[op.i] = row[op.i] + op.p * row[op.j]
        elif op.kind == STABILIZE:
            for row in g:
                row.append(Poly())
            g.append([Poly()] * n + [Poly([1])])
        else:
            if n < 2:
                raise InvalidOpError("cannot destabilize a 1x1 matrix")
            last = n - 1
            border_ok = (
                g[last][last] == Poly([1])
                and all(g[last][j].is_zero() for j in range(last))
                and all(g[i][last].is_zero() for i in range(last))
            )
            if not border_ok:
                raise InvalidOpError("destabilize needs an identity border row and column")
            g.pop()
            for row in g:
                row.pop()
        if record:
            self.ops.append(op)

    def row_add(self, i: int, j: int, p: Poly) -> None:
        if not p.is_zero():
            self.apply(ElOp(ROW_ADD, i, j, p))

    def col_add(self, i: int, j: int, p: Poly) -> None:
        if not p.is_zero():
            self.apply(ElOp(COL_ADD, i, j, p))

    def stabilize(self) -> None:
        self.apply(ElOp(STABILIZE))

    def destabilize(self) -> None:
        self.apply(ElOp(DESTABILIZE))

    def a_grid(self) -> list[list[Poly]]:
        """Entries of A where the working matrix is I - A."""
        n = len(self.grid)
        return [
            [(Poly([1]) if i == j else Poly()) - self.grid[i][j] for j in range(n)]
            for i in range(n)
        ]

    def current(self) -> PolyMatrix:
        return PolyMatrix.from_entries(self.a_grid(), self.ring)


def sharp_of(a: PolyMatrix, k: int | None = None, n: int | None = None) -> Matrix:
    """Block companion of ``a`` over tR[t] with ``k`` blocks of size ``n``.

    ``k`` defaults to the degree and ``n`` to the size; larger values pad with
    zero coefficients / zero rows and columns.
    """
    if not a.coefficient(0).is_zero():
        raise PreconditionError("matrix must lie over tR[t] (nonzero constant term)")
    k = max(a.degree, 1) if k is None else k
    n = a.size if n is None else n
    if k < 1 or k < a.degree:
        raise PreconditionError(f"block count {k} is below the degree {a.degree}")
    if n < a.size:
        raise PreconditionError(f"block size {n} is below the matrix size {a.size}")
    ring = a.ring
    z = R.zero(ring)
    o = R.one(ring)
    size = n * k
    grid = [[z] * size for _ in range(size)]
    for blk in range(k):
        coeff = a.coefficient(blk + 1)
        for i in range(a.size):
            for j in range(a.size):
                grid[i][blk * n + j] = coeff[i, j]
    for blk in range(1, k):
        for i in range(n):
            grid[blk * n + i][(blk - 1) * n + i] = o
    return Matrix._raw(grid, ring)


def embed_as_pencil(a: Matrix) -> PolyMatrix:
    """The polynomial matrix t*a, the finite part of I - t*a."""
    if not a.is_square:
        raise ShapeError("only square matrices define a pencil")
    return PolyMatrix([Matrix.zeros(a.rows, a.rows, a.ring), a], size=a.rows, ring=a.ring)


def apply_oplog(log: ElOpLog) -> tuple[PolyMatrix, bool]:
    """Replay ``log.ops`` on I - initial; return (B, B == log.final)."""
    rec = OpRecorder(log.initial)
    for op in log.ops:
        rec.apply(op, record=False)
    result = rec.current()
    return result, result == log.final


def det_certificate(log: ElOpLog) -> bool:
    """det(I - initial) == det(I - final) as polynomials in t."""
    before = det_of_grid(log.initial.identity_minus(), log.initial.ring)
    after = det_of_grid(log.final.identity_minus(), log.final.ring)
    return before == after


# -- the bad-ring fixture --------------------------------------------------------


def _laurent(*terms) -> R.LaurentElement:
    return R.LaurentElement({(a, b): c for (a, b, c) in terms})


@dataclass(frozen=True)
class BadRingFixture:
    """Nilpotent matrices over Q[t^2, t^3, z, 1/z] whose class in NK_1 is nontrivial.

    ``annotations`` records claims that are cited rather than machine-checked.
    """

    M: PolyMatrix
    N: Matrix
    Nprime: Matrix
    annotations: dict = field(default_factory=dict)


def badring_M() -> PolyMatrix:
    """M = sum_{i=1}^5 s^i M_i with entries in Q[t^2, t^3, z, 1/z]."""
    one_minus_z = lambda tp: _laurent((tp, 0, 1), (tp, 1, -1))  # noqa: E731
    one_minus_zinv = lambda tp: _laurent((tp, 0, 1), (tp, -1, -1))  # noqa: E731
    zinv_minus_one = lambda tp: _laurent((tp, -1, 1), (tp, 0, -1))  # noqa: E731
    zero = R.LaurentElement()
    entries = {k: [[zero, zero], [zero, zero]] for k in range(6)}
    # (1,1): (1 - 1/z) s^4 t^4
    entries[4][0][0] = one_minus_zinv(4)
    # (1,2): (1 - z)(s^2 t^2 - s^3 t^3)
    entries[2][0][1] = one_minus_z(2)
    entries[3][0][1] = -one_minus_z(3)
    # (2,1): (1/z - 1) s^2 t^2 (1 + st + s^2 t^2 + s^3 t^3)
    for k in range(2, 6):
        entries[k][1][0] = zinv_minus_one(k)
    # (2,2): (1 - z) s^4 t^4
    entries[4][1][1] = one_minus_z(4)
    coeffs = [Matrix._raw(entries[k], R.LAURENT) for k in range(6)]
    return PolyMatrix(coeffs, size=2, ring=R.LAURENT)


def badring_N_transcribed() -> Matrix:
    """The 10x10 nilpotent matrix N entered entry by entry."""
    zero = R.LaurentElement()
    one = R.LaurentElement.constant(1)
    g = [[zero] * 10 for _ in range(10)]
    g[0][3] = _laurent((2, 0, 1), (2, 1, -1))  # (1 - z) t^2
    g[0][5] = _laurent((3, 0, -1), (3, 1, 1))  # (1 - z)(-t^3)
    g[0][6] = _laurent((4, 0, 1), (4, -1, -1))  # (1 - 1/z) t^4
    g[1][2] = _laurent((2, -1, 1), (2, 0, -1))  # (1/z - 1) t^2
    g[1][4] = _laurent((3, -1, 1), (3, 0, -1))  # (1/z - 1) t^3
    g[1][6] = _laurent((4, -1, 1), (4, 0, -1))  # (1/z - 1) t^4
    g[1][7] = _laurent((4, 0, 1), (4, 1, -1))  # (1 - z) t^4
    g[1][8] = _laurent((5, -1, 1), (5, 0, -1))  # (1/z - 1) t^5
    for i in range(2, 10):
        g[i][i - 2] = one
    return Matrix._raw(g, R.LAURENT)


def badring_fixture() -> BadRingFixture:
    m = badring_M()
    n = badring_N_transcribed()
    derived = sharp_of(m, 5, 2)
    if derived != n:
        raise AssertionError("companion of M does not reproduce the transcribed N")
    nprime = n.slice(0, 9, 0, 9)
    return BadRingFixture(
        M=m,
        N=n,
        Nprime=nprime,
        annotations={
            "nil0_nontrivial": "cited, not machine-checked",
            "nk1_nontrivial": "cited, not machine-checked",
        },
    )


def badring_checks(fixture: BadRingFixture) -> dict[str, bool]:
    """All exact checks on the fixture, keyed by check name."""
    entries_m = [c for coeff in fixture.M.coeffs for row in coeff for c in row]
    checks = {
        "N_nilpotent": is_nilpotent(fixture.N)[0],
        "Nprime_nilpotent": is_nilpotent(fixture.Nprime)[0],
        "M_entries_in_subring": all(R.in_subring(x) for x in entries_m),
        "N_entries_in_subring": all(R.in_subring(x) for row in fixture.N for x in row),
        "Nprime_entries_in_subring": all(R.in_subring(x) for row in fixture.Nprime for x in row),
        "sharp_of_M_equals_N": sharp_of(fixture.M, 5, 2) == fixture.N,
        "det_I_minus_M_is_1": det_of_grid(fixture.M.identity_minus(), R.LAURENT) == Poly([1]),
    }
    return checks


def pad_witness_chain(a: PolyMatrix, k: int):
    """Chain relating sharp_of(a, k+1) to sharp_of(a, k) by a nilpotent extension.

    With a zero last block the (k+1)-block companion is conjugate, by a block
    permutation, to [[0, X], [0, sharp_of(a, k)]]; the chain consists of that
    permutation similarity followed by the extension move.
    """
    if k < max(a.degree, 1):
        raise PreconditionError("k must be at least the degree")
    n = a.size
    small = sharp_of(a, k, n)
    big = sharp_of(a, k + 1, n)
    # Move the last block to the front: big ~ [[0, X], [0, small]] with X = [0 .. 0 I].
    order = list(range(n * k, n * (k + 1))) + list(range(n * k))
    perm = Matrix.permutation(order)
    conj, step1 = similarity_move(big, perm)
    x = conj.slice(0, n, n, n * (k + 1))
    ext, w = nilpotent_extension_move(small, x, side="lower")
    if ext != conj:
        raise AssertionError("padded companion is not a nilpotent extension")
    return SSEChain((big, conj, small), (step1, w))
