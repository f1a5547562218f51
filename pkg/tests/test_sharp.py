import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import rand_matrix
from shiftequiv import ring as R
from shiftequiv.errors import InvalidOpError, PreconditionError
from shiftequiv.matrix import Matrix, PolyMatrix, det_of_grid, is_nilpotent
from shiftequiv.poly import Poly
from shiftequiv.sharp import (
    ElOp,
    ElOpLog,
    apply_oplog,
    badring_checks,
    badring_fixture,
    badring_M,
    det_certificate,
    embed_as_pencil,
    pad_witness_chain,
    sharp_of,
)
from shiftequiv.sse import verify_sse_chain
from shiftequiv.ring import T, Z, ZINV


def pm(*coeffs):
    return PolyMatrix([Matrix.zeros(coeffs[0].rows)] + list(coeffs))


def test_sharp_single_block():
    n = Matrix([[0, 2], [1, 0]])
    assert sharp_of(pm(n), 1) == n


def test_sharp_two_blocks():
    a1, a2 = Matrix([[1, 2], [3, 4]]), Matrix([[5, 6], [7, 8]])
    eye, zero = Matrix.identity(2), Matrix.zeros(2)
    assert sharp_of(pm(a1, a2), 2) == Matrix.block([[a1, a2], [eye, zero]])


def test_sharp_pads_with_zero_blocks():
    a1 = Matrix([[1]])
    assert sharp_of(pm(a1), 3) == Matrix([[1, 0, 0], [1, 0, 0], [0, 1, 0]])


def test_sharp_rejects_constant_term():
    with pytest.raises(PreconditionError):
        sharp_of(PolyMatrix([Matrix([[1]])]), 1)


def test_embed_as_pencil():
    assert embed_as_pencil(Matrix([[0]])).is_zero()
    a = Matrix([[1, 1], [1, 0]])
    assert embed_as_pencil(a) == pm(a)
    assert sharp_of(embed_as_pencil(a), 1) == a


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_companion_determinant_identity(seed):
    rng = random.Random(seed)
    n, k = rng.randint(1, 2), rng.randint(1, 3)
    a = PolyMatrix([Matrix.zeros(n)] + [rand_matrix(rng, n, lo=-2, hi=2) for _ in range(k)])
    big = sharp_of(a, k)
    assert det_of_grid(embed_as_pencil(big).identity_minus()) == det_of_grid(a.identity_minus())


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_padding_chain_verifies(seed):
    rng = random.Random(seed)
    n, k = rng.randint(1, 2), rng.randint(1, 3)
    a = PolyMatrix([Matrix.zeros(n)] + [rand_matrix(rng, n, lo=-2, hi=2) for _ in range(k)])
    chain = pad_witness_chain(a, max(a.degree, 1))
    assert verify_sse_chain(chain)
    assert chain.source == sharp_of(a, max(a.degree, 1) + 1)
    assert chain.target == sharp_of(a, max(a.degree, 1))


def test_empty_log_replays():
    a = pm(Matrix([[0, 1], [0, 0]]))
    log = ElOpLog(a, (), a)
    assert apply_oplog(log) == (a, True)
    assert det_certificate(log)


def test_replay_and_tamper():
    a = pm(Matrix([[0, "1/2"], [0, 0]]))
    op = ElOp("row_add", 0, 1, Poly([0, "1/2"]))
    # I - A = [[1, -t/2], [0, 1]]; row 0 += (t/2) row 1 clears the corner
    log = ElOpLog(a, (op,), PolyMatrix.zero(2))
    assert apply_oplog(log) == (PolyMatrix.zero(2), True)
    tampered = ElOpLog(a, (op,), pm(Matrix([[1, 0], [0, 0]])))
    assert apply_oplog(tampered)[1] is False
    assert det_certificate(tampered) is False


def test_invalid_ops():
    a = pm(Matrix([[0, 1], [0, 0]]))
    with pytest.raises(InvalidOpError):
        apply_oplog(ElOpLog(a, (ElOp("row_add", 0, 5, Poly([1])),), a))
    with pytest.raises(InvalidOpError):
        ElOp("swap", 0, 1, Poly([1]))
    with pytest.raises(InvalidOpError):
        ElOp("row_add", 1, 1, Poly([1]))
    ops = (ElOp("stabilize"), ElOp("row_add", 2, 0, Poly([1])), ElOp("destabilize"))
    with pytest.raises(InvalidOpError):
        apply_oplog(ElOpLog(a, ops, a))


def test_badring_entry_from_display():
    m = badring_M()
    assert m.coefficient(2)[1, 0] == (ZINV - 1) * T**2
    assert m.coefficient(4)[0, 0] == (1 - ZINV) * T**4
    assert m.degree == 5


def test_badring_fixture_checks():
    fixture = badring_fixture()
    assert fixture.N.shape == (10, 10) and fixture.Nprime.shape == (9, 9)
    assert all(badring_checks(fixture).values())
    # least nilpotency indices [DERIVED: sympy power computation]
    assert is_nilpotent(fixture.N) == (True, 10)
    assert is_nilpotent(fixture.Nprime) == (True, 9)
    assert all(R.in_subring(x) for row in fixture.N for x in row)
    assert fixture.annotations["nil0_nontrivial"] == "cited, not machine-checked"


def test_badring_tamper_detected():
    fixture = badring_fixture()
    grid = fixture.N.tolist()
    grid[0][3] = grid[0][3] + T**2
    tampered = type(fixture)(fixture.M, Matrix._raw(grid, R.LAURENT), fixture.Nprime)
    checks = badring_checks(tampered)
    assert not checks["sharp_of_M_equals_N"]
