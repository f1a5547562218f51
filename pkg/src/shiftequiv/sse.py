"""Elementary/strong shift equivalence and shift equivalence witnesses.

A witness is never trusted: every verifier recomputes the products it
certifies.  Constructors in this module (similarity and nilpotent-extension
moves, the nonnegative-nilpotent reduction) return witnesses that the
matching verifier accepts.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    InvalidLagError,
    InvalidWitnessError,
    NotAUnitError,
    PreconditionError,
    ShapeError,
)
from .matrix import Matrix, det_exact, is_nilpotent


@dataclass(frozen=True)
class ESSEWitness:
    """(U, V) certifying A = UV and B = VU."""

    U: Matrix
    V: Matrix

    def reversed(self) -> ESSEWitness:
        """The same relation read from B to A."""
        return ESSEWitness(self.V, self.U)


@dataclass(frozen=True)
class SSEChain:
    endpoints: tuple[Matrix, ...]
    steps: tuple[ESSEWitness, ...]

    def __post_init__(self):
        object.__setattr__(self, "endpoints", tuple(self.endpoints))
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def lag(self) -> int:
        return len(self.steps)

    @property
    def source(self) -> Matrix:
        return self.endpoints[0]

    @property
    def target(self) -> Matrix:
        return self.endpoints[-1]

    @classmethod
    def from_steps(cls, source: Matrix, steps: Sequence[ESSEWitness]) -> SSEChain:
        """Build the endpoint list by replaying B = VU at each step."""
        endpoints = [source]
        for w in steps:
            endpoints.append(w.V @ w.U)
        return cls(tuple(endpoints), tuple(steps))

    def then(self, other: SSEChain) -> SSEChain:
        if self.target != other.source:
            raise InvalidWitnessError("chains do not compose")
        return SSEChain(self.endpoints + other.endpoints[1:], self.steps + other.steps)


@dataclass(frozen=True)
class SEWitness:
    U: Matrix
    V: Matrix
    lag: int


def _check_esse_shapes(a: Matrix, b: Matrix, w: ESSEWitness) -> None:
    p, q = w.U.shape
    if w.V.shape != (q, p):
        raise ShapeError(f"U is {w.U.shape} but V is {w.V.shape}")
    if a.shape != (p, p) or b.shape != (q, q):
        raise ShapeError(f"endpoints {a.shape}, {b.shape} do not fit U {w.U.shape}")


def verify_esse(a: Matrix, b: Matrix, w: ESSEWitness) -> bool:
    _check_esse_shapes(a, b, w)
    return w.U @ w.V == a and w.V @ w.U == b


def verify_sse_chain(c: SSEChain) -> bool:
    if not c.steps or len(c.endpoints) != len(c.steps) + 1:
        return False
    for a, b, w in zip(c.endpoints, c.endpoints[1:], c.steps):
        try:
            if not verify_esse(a, b, w):
                return False
        except ShapeError:
            return False
    return True


def verify_se(a: Matrix, b: Matrix, w: SEWitness) -> bool:
    if w.lag < 1:
        raise InvalidLagError(f"lag must be positive, got {w.lag}")
    if not (a.is_square and b.is_square):
        raise ShapeError("shift equivalence endpoints must be square")
    if w.U.shape != (a.rows, b.rows) or w.V.shape != (b.rows, a.rows):
        raise ShapeError(f"U {w.U.shape} / V {w.V.shape} do not fit {a.shape}, {b.shape}")
    return (
        a ** w.lag == w.U @ w.V
        and b ** w.lag == w.V @ w.U
        and a @ w.U == w.U @ b
        and b @ w.V == w.V @ a
    )


def sse_to_se(c: SSEChain) -> SEWitness:
    """Collapse a chain to one lag-l witness: U = U1...Ul, V = Vl...V1."""
    if not verify_sse_chain(c):
        raise InvalidWitnessError("chain does not verify")
    u = c.steps[0].U
    v = c.steps[0].V
    for w in c.steps[1:]:
        u = u @ w.U
        v = w.V @ v
    return SEWitness(u, v, c.lag)


def similarity_move(a: Matrix, u: Matrix) -> tuple[Matrix, ESSEWitness]:
    """Conjugate ``a`` by ``u`` as a single ESSE step (u, u^-1 a)."""
    if not u.is_square or u.rows != a.rows:
        raise ShapeError(f"conjugator {u.shape} does not fit {a.shape}")
    if det_exact(u) == 0:
        raise NotAUnitError("conjugator is not invertible")
    u_inv = u.inverse()
    left = u_inv @ a
    return left @ u, ESSEWitness(u, left)


def nilpotent_extension_move(a: Matrix, x: Matrix, side: str = "upper") -> tuple[Matrix, ESSEWitness]:
    """Extend ``a`` by a nilpotent block.

    ``side="upper"`` gives [[A, X], [0, 0]] (X has as many rows as A);
    ``side="lower"`` gives [[0, X], [0, A]] (X has as many columns as A).
    The returned witness relates the extension to ``a``:
    ``verify_esse(extension, a, w)`` holds.
    """
    n = a.rows
    if not a.is_square:
        raise ShapeError("only square matrices can be extended")
    if side == "upper":
        if x.rows != n:
            raise ShapeError(f"X must have {n} rows, has {x.rows}")
        r = x.cols
        top = Matrix.block([[a, x]])
        ext = Matrix.block([[top], [Matrix.zeros(r, n + r, a.ring)]])
        u = Matrix.block([[Matrix.identity(n, a.ring)], [Matrix.zeros(r, n, a.ring)]])
        return ext, ESSEWitness(u, top)
    if side == "lower":
        if x.cols != n:
            raise ShapeError(f"X must have {n} columns, has {x.cols}")
        r = x.rows
        left = Matrix.block([[x], [a]])
        ext = Matrix.block([[Matrix.zeros(n + r, r, a.ring), left]])
        v = Matrix.block([[Matrix.zeros(n, r, a.ring), Matrix.identity(n, a.ring)]])
        return ext, ESSEWitness(left, v)
    raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")


def nilpotent_order(n: Matrix) -> list[int]:
    """Topological order of the digraph i -> j iff n[i, j] != 0, smallest index first."""
    size = n.rows
    indeg = [0] * size
    succ = [[] for _ in range(size)]
    for i in range(size):
        for j in range(size):
            if n[i, j] != 0:
                succ[i].append(j)
                indeg[j] += 1
    heap = [i for i in range(size) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, j)
    if len(order) != size:
        raise PreconditionError("digraph has a cycle; matrix is not nilpotent")
    return order


def reduce_nonneg_nilpotent(n: Matrix) -> SSEChain:
    """SSE chain from a nonnegative nilpotent matrix down to [0].

    One permutation similarity makes the matrix strictly upper triangular;
    then the zero last row is peeled repeatedly using
    [[X, Y], [0, 0]] = [[I], [0]] [X Y] and X = [X Y] [[I], [0]].
    """
    if not n.is_square:
        raise ShapeError("nilpotent reduction needs a square matrix")
    if not n.is_nonnegative():
        raise PreconditionError("matrix has a negative entry")
    if not is_nilpotent(n)[0]:
        raise PreconditionError("matrix is not nilpotent")
    perm = Matrix.permutation(nilpotent_order(n))
    current, step = similarity_move(n, perm)
    endpoints = [n, current]
    steps = [step]
    while current.rows > 1:
        m = current.rows
        u = Matrix.block([[Matrix.identity(m - 1)], [Matrix.zeros(1, m - 1)]])
        v = current.slice(0, m - 1, 0, m)
        w = ESSEWitness(u, v)
        current = v @ u
        endpoints.append(current)
        steps.append(w)
    return SSEChain(tuple(endpoints), tuple(steps))
