import json
import random
import subprocess
import sys

import pytest

from shiftequiv.cli import main, random_chain
from shiftequiv.matrix import Matrix, PolyMatrix
from shiftequiv.serialize import encode_chain, encode_esse, encode_matrix, encode_polymatrix, encode_se
from shiftequiv.sse import ESSEWitness, sse_to_se


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def run(argv, capsys):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def esse_doc(a, b, u, v):
    return {"A": encode_matrix(Matrix(a)), "B": encode_matrix(Matrix(b)), **encode_esse(ESSEWitness(Matrix(u), Matrix(v)))}


def test_verify_esse(tmp_path, capsys):
    good = write(tmp_path, "good.json", esse_doc([[0, 1], [0, 0]], [[0]], [[1], [0]], [[0, 1]]))
    bad = write(tmp_path, "bad.json", esse_doc([[0, 1], [0, 0]], [[1]], [[1], [0]], [[0, 1]]))
    code, report = run(["verify", "esse", good], capsys)
    assert code == 0 and report["verdicts"]["verified"] is True and report["passed"]
    code, report = run(["verify", "esse", bad], capsys)
    assert code == 1 and report["verdicts"]["verified"] is False


def test_verify_chain_and_se(tmp_path, capsys):
    chain = random_chain(random.Random(5))
    path = write(tmp_path, "chain.json", encode_chain(chain))
    code, report = run(["verify", "sse", path], capsys)
    assert code == 0 and report["verdicts"]["lag"] == chain.lag
    se = sse_to_se(chain)
    doc = {"A": encode_matrix(chain.source), "B": encode_matrix(chain.target), **encode_se(se)}
    assert run(["verify", "se", write(tmp_path, "se.json", doc)], capsys)[0] == 0
    doc["lag"] = 0
    assert run(["verify", "se", write(tmp_path, "se0.json", doc)], capsys)[0] == 2


def test_verify_shape_mismatch_is_failure(tmp_path, capsys):
    doc = esse_doc([[0, 1], [0, 0]], [[0]], [[1, 0], [0, 1]], [[0, 1]])
    code, report = run(["verify", "esse", write(tmp_path, "w.json", doc)], capsys)
    assert code == 1 and "shape_error" in report["verdicts"]


@pytest.mark.parametrize("content", ["{not json", json.dumps({"A": 1}), json.dumps([1, 2])])
def test_verify_malformed(tmp_path, capsys, content):
    assert main(["verify", "esse", write(tmp_path, "x.json", content)]) == 2
    assert main(["verify", "sse", write(tmp_path, "y.json", content)]) == 2


def test_missing_file(capsys):
    assert main(["verify", "esse", "/nonexistent/file.json"]) == 2


def test_clear(tmp_path, capsys):
    path = write(tmp_path, "n.json", encode_matrix(Matrix([[0, 1], [0, 0]])))
    code, report = run(["clear", path, "--k", "1"], capsys)
    assert code == 0 and report["verdicts"]["J"] == 8
    assert report["output"]["M"]["rows"] == 8 and report["output"]["abs_traces"] == ["0/1"]
    assert "log" in report["output"]["steps"][0]
    code, report = run(["clear", path, "--k", "1", "--no-logs"], capsys)
    assert "log" not in report["output"]["steps"][0]


def test_clear_failures(tmp_path, capsys):
    ident = write(tmp_path, "i.json", encode_matrix(Matrix.identity(2)))
    code, report = run(["clear", ident], capsys)
    assert code == 1 and report["details"]["condition"]
    nil = write(tmp_path, "n.json", encode_matrix(Matrix([[0, 1], [0, 0]])))
    with pytest.raises(SystemExit) as info:
        main(["clear", nil, "--k", "0"])
    assert info.value.code == 2


@pytest.mark.parametrize(
    "coeffs,code",
    [(["-2", "-1", "1"], 0), (["-1", "0", "1"], 1), (["1", "0", "1"], 1), (["-1", "2"], 2), (["0", "-1", "1"], 2)],
)
def test_spectra(tmp_path, capsys, coeffs, code):
    path = write(tmp_path, "d.json", {"coeffs": coeffs})
    got, report = run(["spectra", path], capsys)
    assert got == code
    if code == 0:
        assert report["output"]["net_traces"][:3] == ["1/1", "4/1", "6/1"]


def test_spectra_flags(tmp_path, capsys):
    path = write(tmp_path, "d.json", {"coeffs": ["-1/2", "1"]})
    assert run(["spectra", path, "--mode", "dense", "--n-max", "4", "--k-max", "3", "--tol", "1/1000"], capsys)[0] == 0
    assert run(["spectra", path], capsys)[0] == 1
    with pytest.raises(SystemExit):
        main(["spectra", path, "--tol", "0"])


def test_badring(capsys):
    code, report = run(["badring"], capsys)
    assert code == 0 and all(v for v in report["verdicts"].values() if isinstance(v, bool))
    code, report = run(["badring", "--tamper"], capsys)
    assert code == 1
    assert [k for k, v in report["verdicts"].items() if v is False]


def test_assemble(tmp_path, capsys):
    c = write(tmp_path, "c.json", encode_matrix(Matrix([[1]])))
    m = write(tmp_path, "m.json", encode_matrix(Matrix([[0]])))
    code, report = run(["assemble", c, m, "--eps", "1/2"], capsys)
    assert code == 0
    assert report["output"]["G"]["entries"] == [["1/2", "1/2"], ["1/2", "1/2"]]
    assert report["output"]["certificate"] == {"primitive": True, "witness_power": 1, "period": 1}
    code, report = run(["assemble", c, m, "--eps", "3/4"], capsys)
    assert code == 1 and report["details"]["condition"] == "eps"
    big = write(tmp_path, "big.json", encode_matrix(Matrix([[1]])))
    code, report = run(["assemble", c, big], capsys)
    assert code == 1 and report["details"]["condition"] == "dominance"


def test_sharp(tmp_path, capsys):
    a1, a2 = Matrix([[1, 2], [3, 4]]), Matrix([[5, 6], [7, 8]])
    path = write(tmp_path, "p.json", encode_polymatrix(PolyMatrix([Matrix.zeros(2), a1, a2])))
    code, report = run(["sharp", path], capsys)
    assert code == 0 and report["verdicts"]["size"] == 4
    assert report["output"]["M"]["entries"][2] == ["1/1", "0/1", "0/1", "0/1"]
    bad = write(tmp_path, "q.json", encode_polymatrix(PolyMatrix([Matrix.identity(2)])))
    assert run(["sharp", bad], capsys)[0] == 1


def test_reduce_nilpotent(tmp_path, capsys):
    path = write(tmp_path, "n.json", encode_matrix(Matrix([[0, 0, 0], [2, 0, 1], [0, 0, 0]])))
    code, report = run(["reduce-nilpotent", path], capsys)
    assert code == 0 and report["verdicts"]["ends_at_zero"] is True
    assert run(["reduce-nilpotent", write(tmp_path, "i.json", encode_matrix(Matrix([[1]])))], capsys)[0] == 1


def test_selfcheck(capsys):
    code, report = run(["selfcheck", "--seed", "3", "--count", "5"], capsys)
    assert code == 0 and report["inputs_digest"]


def test_reports_are_deterministic(tmp_path, capsys):
    path = write(tmp_path, "n.json", encode_matrix(Matrix([[0, 1], [0, 0]])))
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["clear", path, "--out", str(out1)]) == 0
    assert main(["clear", path, "--out", str(out2)]) == 0
    capsys.readouterr()
    r1, r2 = json.loads(out1.read_text()), json.loads(out2.read_text())
    assert set(r1) == {"command", "inputs_digest", "verdicts", "output", "timings", "passed"}
    assert all(isinstance(v, int) for v in r1["timings"].values())
    r1.pop("timings"), r2.pop("timings")
    assert r1 == r2


def test_summary_output(tmp_path, capsys):
    assert main(["badring"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("badring: PASS")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "shiftequiv", "selfcheck", "--count", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and "selfcheck: PASS" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "shiftequiv", "nosuchcommand"], capture_output=True, text=True)
    assert proc.returncode == 2
