import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from livsic.cli import main
from livsic.golden import FDEG2_W, FDEG2_X, FDEG_U, FDEG_V
from livsic.herglotz import AtomicMatrixMeasure, measure_deviation
from livsic.inner import ScalarInner
from livsic.jsonio import (inner_from_json, inner_to_json, matrix_from_json, matrix_to_json, measure_from_json,
                           measure_to_json)
from livsic.numeric import multiset_distance

finite = st.floats(-1e6, 1e6, allow_nan=False)
complexes = st.tuples(finite, finite).map(lambda t: complex(*t))


@pytest.fixture
def files(tmp_path):
    def write(name, value):
        path = tmp_path / name
        path.write_text(json.dumps(value))
        return str(path)

    return {
        "V": write("V.json", matrix_to_json(FDEG_V)),
        "U": write("U.json", matrix_to_json(FDEG_U)),
        "X": write("X.json", matrix_to_json(FDEG2_X)),
        "W": write("W.json", matrix_to_json(FDEG2_W)),
        "theta": write("theta.json", {"constant": [1, 0], "zeros": [[0, 1], [0, 1]]}),
        "phi": write("phi.json", {"constant": [1, 0], "zeros": [[0, 1], [0, 1], [0, 0.25]]}),
        "borderline": write("borderline.json", {"constant": [1, 0], "zeros": [[0, 1], [1e-7, 1], [0, 0.25]]}),
        "param": write("param.json", [[[0.6, 0.8]]]),
        "h": write("h.json", [1, 0]),
        "circle": write("circle.json", {"domain": "circle", "atoms": [
            {"point": [1, 0], "weight": [[4 / 9]]},
            {"point": [-0.8, 0.6], "weight": [[5 / 18]]},
            {"point": [-0.8, -0.6], "weight": [[5 / 18]]}]}),
        "dir": tmp_path,
    }


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, (json.loads(out.out) if out.out.strip() else None), out.err


def test_livsic_nilpotent(capsys, files):
    status, report, _ = run(capsys, "livsic", "--V", files["V"])
    assert status == 0 and report["pass"]
    assert multiset_distance([complex(*z) for z in report["function"]["zeros"]], [1j, 1j]) < 1e-8


def test_report_key_order(capsys, files):
    _, report, _ = run(capsys, "clark", "--U", files["U"], "--V", files["V"])
    keys = list(report)
    assert keys[0] == "command" and keys[-3:] == ["items", "max_deviation", "pass"]
    assert list(report["items"][0]) == ["name", "computed", "expected", "deviation", "tolerance", "pass"]


def test_clark_weights(capsys, files):
    status, report, _ = run(capsys, "clark", "--U", files["U"], "--V", files["V"])
    assert status == 0
    measure = measure_from_json(report["measure"])
    expected = AtomicMatrixMeasure("circle", (1, complex(-0.8, 0.6), complex(-0.8, -0.6)),
                                   (np.eye(1) * 4 / 9, np.eye(1) * 5 / 18, np.eye(1) * 5 / 18))
    assert measure_deviation(measure, expected) < 1e-10


def test_transform_measure_both_ways(capsys, files, tmp_path):
    status, report, _ = run(capsys, "transform-measure", "--measure", files["circle"])
    assert status == 0
    assert abs(matrix_from_json(report["herglotz"]["P"])[0, 0] - 4 / 9) < 1e-12
    line = tmp_path / "line.json"
    line.write_text(json.dumps(report["herglotz"]["measure"]))
    p = tmp_path / "P.json"
    p.write_text(json.dumps(report["herglotz"]["P"]))
    status, back, _ = run(capsys, "transform-measure", "--measure", str(line), "--P", str(p))
    assert status == 0
    original = measure_from_json(json.loads(open(files["circle"]).read()))
    assert measure_deviation(measure_from_json(back["measure"]), original) < 1e-12


def test_ext_char(capsys, files):
    status, report, _ = run(capsys, "ext-char", "--U", files["U"], "--V", files["V"])
    assert status == 0
    zeros = [complex(*z) for z in report["function"]["zeros"]]
    assert multiset_distance(zeros, [1j, 1j, 0.25j]) < 1e-8


def test_divides_honours_tolerance(capsys, files):
    status, report, _ = run(capsys, "divides", "--theta", files["theta"], "--phi", files["phi"])
    assert status == 0 and report["items"][0]["computed"] is True
    status, _, _ = run(capsys, "divides", "--theta", files["theta"], "--phi", files["borderline"], "--tol", "1e-6")
    assert status == 0
    status, report, _ = run(capsys, "divides", "--theta", files["theta"], "--phi", files["borderline"],
                            "--tol", "1e-8")
    assert status == 1 and report["items"][0]["computed"] is False
    status, _, _ = run(capsys, "divides", "--theta", files["theta"], "--phi", files["borderline"],
                       "--tol", "1e-8", "--expect", "false")
    assert status == 0


def test_frostman(capsys, files, tmp_path):
    shifted = tmp_path / "s.json"
    shifted.write_text(json.dumps({"constant": [1, 0], "zeros": [[0.5, 2], [-1, 0.3]]}))
    status, report, _ = run(capsys, "frostman", "--theta", str(shifted))
    assert status == 0
    assert abs(inner_from_json(report["function"])(1j)) < 1e-8


def test_ac_check(capsys, files):
    status, report, _ = run(capsys, "ac-check", "--V", files["V"], "--param", files["param"])
    assert status == 0 and report["pass"]


def test_kernels(capsys, files):
    status, report, _ = run(capsys, "kernels", "--U", files["U"], "--V", files["V"])
    assert status == 0 and len(report["items"]) == 6


def test_kernels_custom_grid(capsys, files):
    status, report, _ = run(capsys, "kernels", "--U", files["U"], "--V", files["V"],
                            "--grid", "[[0.1, 0.5], [1, 2], [-0.3, 1.4]]")
    assert status == 0 and len(report["points"]) == 3


def test_cyclic(capsys, files):
    status, report, _ = run(capsys, "cyclic", "--U", files["X"], "--V", files["V"], "--h", files["h"],
                            "--w", "[0.2, 1.5]", "--k", "6")
    assert status == 0
    assert len(report["identity_residuals"]) == 7


def test_synthesize(capsys, files):
    status, report, _ = run(capsys, "synthesize", "--theta", files["theta"], "--phi", files["phi"])
    assert status == 0
    U = matrix_from_json(report["U"])
    assert np.allclose(U.conj().T @ U, np.eye(3), atol=1e-12)


def test_order_check(capsys, files):
    status, report, _ = run(capsys, "order-check", "--U", files["X"], "--V-small", files["V"],
                            "--V-big", files["W"])
    assert status == 0
    assert [item["computed"] for item in report["items"][:3]] == [True, True, True]


@pytest.mark.parametrize("example", ["fdeg", "fdeg2"])
def test_reproduce(capsys, example):
    status, report, _ = run(capsys, "reproduce", example)
    assert status == 0 and report["pass"]


def test_reproduce_tolerance_semantics(capsys):
    # The pipeline is accurate to a few ulps, so 1e-15 still passes; the
    # verdict must track the largest deviation exactly.
    status, report, _ = run(capsys, "reproduce", "fdeg", "--tol", "1e-15")
    assert (status == 0) == (report["max_deviation"] <= 1e-15)
    status, report, _ = run(capsys, "reproduce", "fdeg", "--tol", "1e-17")
    assert status == 1 and not report["pass"]
    failing = [item for item in report["items"] if not item["pass"]]
    assert failing and all(item["deviation"] > 1e-17 for item in failing)


def test_environment_tolerance(capsys, monkeypatch):
    monkeypatch.setenv("LIVSIC_TOL", "1e-17")
    assert run(capsys, "reproduce", "fdeg")[0] == 1
    monkeypatch.setenv("LIVSIC_TOL", "1e-6")
    assert run(capsys, "reproduce", "fdeg")[0] == 0
    assert run(capsys, "reproduce", "fdeg", "--tol", "1e-17")[0] == 1
    monkeypatch.setenv("LIVSIC_TOL", "lots")
    assert run(capsys, "reproduce", "fdeg")[0] == 2
    monkeypatch.delenv("LIVSIC_TOL")
    assert run(capsys, "reproduce", "fdeg", "--tol", "-1")[0] == 2


def test_truncated_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('[[[0, 0], [0, 0]],\n [[1, 0]')
    status, report, err = run(capsys, "livsic", "--V", str(bad))
    assert status == 2 and report is None
    assert "line 2" in err and "column" in err


def test_dimension_mismatch(capsys, tmp_path, files):
    ragged = tmp_path / "ragged.json"
    ragged.write_text(json.dumps([[[0, 0], [0, 0]], [[1, 0]]]))
    status, _, err = run(capsys, "livsic", "--V", str(ragged))
    assert status == 2 and "row 1" in err
    small = tmp_path / "small.json"
    small.write_text(json.dumps([[[1, 0]]]))
    assert run(capsys, "clark", "--U", str(small), "--V", files["V"])[0] == 2


def test_bad_field(capsys, tmp_path, files):
    inner = tmp_path / "inner.json"
    inner.write_text(json.dumps({"constant": [1, 0], "zeros": [[0, 1], "i"]}))
    status, _, err = run(capsys, "divides", "--theta", str(inner), "--phi", files["phi"])
    assert status == 2 and "zeros[1]" in err


def test_output_file(capsys, tmp_path, files):
    target = tmp_path / "report.json"
    status = main(["livsic", "--V", files["V"], "--output", str(target)])
    assert status == 0 and capsys.readouterr().out == ""
    assert json.loads(target.read_text())["command"] == "livsic"


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "livsic", "reproduce", "fdeg"], capture_output=True, text=True)
    assert done.returncode == 0
    assert json.loads(done.stdout)["pass"] is True


@given(st.lists(st.lists(complexes, min_size=3, max_size=3), min_size=1, max_size=4))
def test_matrix_round_trip(rows):
    m = np.array(rows, dtype=complex)
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(m))))
    assert np.max(np.abs(back - m)) <= 1e-12 * max(1, np.max(np.abs(m)))


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(0.01, 5)).map(lambda t: complex(*t)), max_size=6),
       st.floats(0, 6.28))
def test_inner_round_trip(zeros, angle):
    f = ScalarInner(np.exp(1j * angle), tuple(zeros))
    g = inner_from_json(json.loads(json.dumps(inner_to_json(f))))
    assert abs(g.constant - f.constant) <= 1e-12 and multiset_distance(g.zeros, f.zeros) <= 1e-12


separated = st.lists(st.floats(-100, 100), min_size=1, max_size=5).filter(
    lambda ps: all(abs(a - b) > 1e-6 for i, a in enumerate(ps) for b in ps[i + 1:]))


@given(separated, st.integers(0, 2**32 - 1))
def test_measure_round_trip(points, seed):
    rng = np.random.default_rng(seed)
    weights = []
    for _ in points:
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        weights.append(a @ a.conj().T)
    m = AtomicMatrixMeasure("line", tuple(points), tuple(weights))
    back = measure_from_json(json.loads(json.dumps(measure_to_json(m))))
    assert measure_deviation(back, m, 1e-12) <= 1e-12 * max(np.linalg.norm(w) for w in weights)
