import json
import subprocess
import sys

import numpy as np
import pytest

from pcindex.cli import AnalysisReport, dump_symbol, main
from pcindex.symbol import PiecewiseSymbol, symbol_from_jumps


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def identity_symbol(n=2, m=3):
    return dump_symbol(PiecewiseSymbol(n, 2.0, np.linspace(0, 2 * np.pi, m, endpoint=False), [np.eye(n)] * m))


def test_analyze_identity(tmp_path, capsys):
    code, rep, _ = run(capsys, "analyze", write(tmp_path, "id.json", identity_symbol()))
    assert code == 0
    assert rep["reducibility"]["type"] == "C"
    assert rep["indices"]["kind"] == "determined" and rep["indices"]["indices"] == [0, 0]
    back = AnalysisReport.from_json(rep).to_json()
    assert json.loads(json.dumps(back)) == rep


def test_analyze_phi_failure(tmp_path, capsys):
    sym = {"n": 1, "p": 2.0, "jumps": [{"angle": 0.0}, {"angle": 3.0}], "arcs": [[[[1, 0]]], [[[-1, 0]]]]}
    code, _, err = run(capsys, "analyze", write(tmp_path, "s.json", sym))
    assert code == 3
    assert "BranchOnBoundary" in err


def test_analyze_diagonal_3x3(tmp_path, capsys):
    # exponent rows summing to 2, 1, 0 inside J = (-0.2, 0.8) for p = 1.25
    eps = np.array([[0.7, 0.6, 0.7], [0.3, 0.4, 0.3], [0.1, -0.15, 0.05]])
    Ms = [np.diag(np.exp(-2j * np.pi * eps[:, k])) for k in range(3)]
    sym = symbol_from_jumps(Ms, [0.2, 2.3, 4.4], p=1.25)
    code, rep, _ = run(capsys, "analyze", write(tmp_path, "d.json", dump_symbol(sym)))
    assert code == 0
    assert rep["reducibility"]["type"] == "D"
    assert rep["indices"]["indices"] == [2, 1, 0]


def test_malformed_symbol(tmp_path, capsys):
    code, _, err = run(capsys, "analyze", write(tmp_path, "bad.json", {"n": 2, "jumps": []}))
    assert code == 2


def test_generate_is_deterministic(tmp_path, capsys):
    args = ["generate", "--shape", "extremal", "--indices", "1,-1", "--m", "4", "--seed", "7"]
    code1, first, _ = run(capsys, *args)
    code2, second, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)
    assert first["indices"] == [1, -1]


def test_generate_rejects_unsorted(capsys):
    code, _, _ = run(capsys, "generate", "--shape", "triangular2", "--indices", "0,1")
    assert code == 2


def test_monodromy_of_zero_system(tmp_path, capsys):
    a = np.exp(2j * np.pi * np.arange(3) / 3)
    sysobj = {"n": 2, "singularities": [[z.real, z.imag] for z in a], "indices": [0, 0],
              "numerators": [[[[0, 0]] * 3] * 2] * 2}
    code, rep, _ = run(capsys, "monodromy", write(tmp_path, "z.json", sysobj))
    assert code == 0
    for chi in rep["chis"]:
        M = np.array([[complex(*x) for x in row] for row in chi])
        assert np.allclose(M, np.eye(2), atol=1e-12)


def test_factor_scalar(tmp_path, capsys):
    sym = {"n": 1, "p": 2.0, "jumps": [{"angle": 0.0}, {"angle": 3.0}], "arcs": [[[[1, 0]]], [[[0, 1]]]]}
    code, rep, _ = run(capsys, "factor", write(tmp_path, "f.json", sym))
    assert code == 0
    assert rep["residual"] < 1e-9


def test_json_out(tmp_path, capsys):
    out = tmp_path / "out.json"
    code, rep, _ = run(capsys, "analyze", write(tmp_path, "id.json", identity_symbol()), "--json-out", str(out))
    assert code == 0 and rep is None
    assert json.loads(out.read_text())["indices"]["indices"] == [0, 0]


def test_module_entry_point(tmp_path):
    path = write(tmp_path, "id.json", identity_symbol(3, 3))
    proc = subprocess.run([sys.executable, "-m", "pcindex", "analyze", path], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["indices"]["indices"] == [0, 0, 0]


def test_selftest(capsys):
    code, rep, _ = run(capsys, "selftest")
    assert code == 0
    assert all(c["passed"] for c in rep["checks"])
