import json
import random
from fractions import Fraction

import pytest

from conftest import rand_invertible, rand_nilpotent, rand_rational_matrix
from shiftequiv import ring as R
from shiftequiv.cli import random_chain
from shiftequiv.clearing import full_prop35
from shiftequiv.errors import FormatError
from shiftequiv.matrix import Matrix, PolyMatrix
from shiftequiv.serialize import (
    canonical_json,
    decode_chain,
    decode_esse,
    decode_log,
    decode_matrix,
    decode_polymatrix,
    decode_se,
    decode_spectrum,
    digest,
    encode_chain,
    encode_cleared,
    encode_esse,
    encode_log,
    encode_matrix,
    encode_polymatrix,
    encode_se,
    encode_spectrum,
    jsonable,
)
from shiftequiv.sharp import apply_oplog, badring_M
from shiftequiv.clearing import clear_degree_step
from shiftequiv.sharp import embed_as_pencil
from shiftequiv.spectral import SpectrumDescriptor
from shiftequiv.sse import SEWitness, similarity_move, sse_to_se, verify_sse_chain


def through_json(obj):
    return json.loads(json.dumps(obj))


def test_matrix_round_trip():
    rng = random.Random(1)
    for n in range(1, 5):
        m = rand_rational_matrix(rng, n)
        assert decode_matrix(through_json(encode_matrix(m))) == m


def test_rectangular_and_flat_entries():
    m = Matrix([[1, "2/3", 0], [-4, 5, "1/7"]])
    data = encode_matrix(m)
    flat = dict(data, entries=[x for row in data["entries"] for x in row])
    assert decode_matrix(flat) == m
    assert decode_matrix({"rows": 1, "cols": 2, "entries": [1, "1/2"]}) == Matrix([[1, "1/2"]])


def test_laurent_matrix_round_trip():
    m = badring_M()
    back = decode_polymatrix(through_json(encode_polymatrix(m)))
    assert back == m and back.ring == R.LAURENT
    one = Matrix([[m.coefficient(1)[0, 0]]])
    data = encode_matrix(one)
    assert decode_matrix(data) == one
    flat = dict(data, entries=[data["entries"][0][0]])
    assert decode_matrix(flat) == one


@pytest.mark.parametrize(
    "bad",
    [
        [],
        {"rows": 2, "cols": 2},
        {"rows": 2, "cols": 2, "entries": [1, 2, 3]},
        {"rows": 1, "cols": 1, "entries": [0.5]},
        {"rows": 1, "cols": 1, "entries": ["1/0"]},
        {"rows": 1, "cols": 1, "entries": ["x"]},
        {"rows": 1, "cols": 1, "ring": "Z/7", "entries": [1]},
        {"rows": -1, "cols": 1, "entries": []},
        {"rows": 0, "cols": 3, "entries": []},
        {"rows": 1, "cols": 1, "entries": "1"},
    ],
)
def test_bad_matrices(bad):
    with pytest.raises(FormatError):
        decode_matrix(bad)


def test_witness_round_trips():
    rng = random.Random(4)
    a = rand_rational_matrix(rng, 3)
    b, w = similarity_move(a, rand_invertible(rng, 3))
    assert decode_esse(through_json(encode_esse(w))) == w
    chain = random_chain(rng)
    back = decode_chain(through_json(encode_chain(chain)))
    assert back == chain and verify_sse_chain(back)
    se = sse_to_se(chain)
    assert decode_se(through_json(encode_se(se))) == se


def test_bad_witnesses():
    with pytest.raises(FormatError):
        decode_esse({"U": encode_matrix(Matrix([[1]]))})
    with pytest.raises(FormatError):
        decode_se({"U": encode_matrix(Matrix([[1]])), "V": encode_matrix(Matrix([[1]])), "lag": "2"})
    with pytest.raises(FormatError):
        decode_chain({"steps": []})


def test_log_round_trip_replays():
    rng = random.Random(8)
    n_mat = rand_nilpotent(rng, 3).scale(Fraction(1, 10**4))
    log = clear_degree_step(embed_as_pencil(n_mat), 1).log
    back = decode_log(through_json(encode_log(log)))
    assert back == log
    assert apply_oplog(back)[1]


def test_polymatrix_shape_mismatch():
    data = encode_polymatrix(PolyMatrix([Matrix.zeros(2), Matrix.identity(2)]))
    data["size"] = 3
    with pytest.raises(FormatError):
        decode_polymatrix(data)


def test_spectrum_round_trip_and_errors():
    d = SpectrumDescriptor((-2, Fraction(-1, 3), 1))
    assert decode_spectrum(through_json(encode_spectrum(d))) == d
    for bad in ({"coeffs": [1, 2]}, {"coeffs": [0, 1]}, {"coeffs": ["a", 1]}, {}):
        with pytest.raises(FormatError):
            decode_spectrum(bad)


def test_cleared_report_is_json():
    r = full_prop35(Matrix([[0, 1], [0, 0]]), 1)
    data = through_json(encode_cleared(r))
    assert data["J"] == 8 and data["abs_traces"] == ["0/1"]
    assert all(data["certificates"].values())
    assert decode_matrix(data["M"]) == r.M
    assert "log" not in encode_cleared(r, with_logs=False)["steps"][0]


def test_canonical_digest_is_order_independent():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert digest({"b": 1, "a": 2}) == digest({"a": 2, "b": 1})
    assert digest({"a": 1}) != digest({"a": 2})


def test_jsonable():
    out = jsonable({"x": Fraction(1, 2), 3: (Matrix([[1]]), "s")})
    assert out == {"x": "1/2", "3": [encode_matrix(Matrix([[1]])), "s"]}
