import json

import pytest
import yaml

from qteich.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def error_of(err):
    return json.loads(err[err.index("{\n"):])


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "--surface", "torus")
    assert code == 0
    report = json.loads(out)
    assert (report["m"], report["n"], report["p"], report["chi"]) == (2, 3, 1, -1)
    assert len(report["punctures"][0]["corners"]) == 6


def test_transport(capsys):
    code, out, _ = run(capsys, "transport", "--surface", "square", "--weights", "4,1,1,1,1", "--path", "1")
    assert code == 0
    report = json.loads(out)
    assert [w[0] for w in report["weights"]] == pytest.approx([0.25, 5, 0.8, 5, 0.8])
    assert report["peripheral_load"] == [[4.0, 0.0], [4.0, 0.0]]
    assert report["triangulation"]["labels"] == [[1, 2, 3], [1, 4, 5]]


def test_output_is_deterministic(capsys):
    argv = ("transport", "--surface", "pentagon", "--weights", "1,2,3,1j,1,1,1", "--path", "1,2,1")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_singular_transport(capsys):
    code, out, err = run(capsys, "transport", "--surface", "square", "--weights=-1,1,1,1,1", "--path", "1")
    assert code == 1
    assert out == ""
    assert error_of(err)["error"] == "SingularWeightError"


def test_flip_boundary_edge(capsys):
    code, _, err = run(capsys, "flip", "--surface", "square", "--edge", "2")
    assert code == 1
    assert error_of(err)["code"] == "boundary-edge"


def test_flip_path(capsys, tmp_path):
    code, out, _ = run(capsys, "flip", "--surface", "square", "--edge", "1")
    assert code == 0
    target = tmp_path / "target.json"
    target.write_text(json.dumps(json.loads(out)["triangulation"]))
    code, out, _ = run(capsys, "flip", "--surface", "square", "--to", str(target))
    assert json.loads(out)["path"] == [1]


def test_unknown_fixture(capsys):
    code, _, err = run(capsys, "validate", "--surface", "klein")
    assert code == 2
    assert error_of(err)["error"] == "InputError"


def test_bad_tolerance(capsys):
    code, _, _ = run(capsys, "validate", "--surface", "torus", "--tolerance", "bogus=1")
    assert code == 2


def test_rep_build_and_classify(capsys, tmp_path):
    path = tmp_path / "rep.json"
    code, _, _ = run(capsys, "rep-build", "--surface", "torus", "--weights", "1,2,3", "--N", "3", "--out", str(path))
    assert code == 0
    code, out, _ = run(capsys, "classify", "--rep", str(path))
    assert code == 0
    report = json.loads(out)
    assert [x[0] for x in report["x"]] == pytest.approx([1, 2, 3])


def test_intertwine_flip(capsys):
    code, out, _ = run(capsys, "intertwine-flip", "--surface", "square", "--edge", "1", "--N", "2", "--matrix")
    assert code == 0
    report = json.loads(out)
    assert report["dim"] == 4
    assert report["residual"] < 1e-8
    assert len(report["matrix"]) == 4


def test_intertwine_path(capsys):
    code, out, _ = run(capsys, "intertwine-path", "--surface", "pentagon", "--path", "1,2", "--N", "2")
    assert code == 0
    assert json.loads(out)["path"] == [1, 2]


def test_pentagon_check(capsys):
    code, out, _ = run(capsys, "pentagon-check", "--N", "2")
    assert code == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert report["verdict"] == "PASS"


def test_holonomy(capsys):
    code, out, _ = run(capsys, "holonomy", "--surface", "torus", "--weights", "1,1,1")
    assert code == 0
    report = json.loads(out)
    assert report["total_load"]["eigenvalues"][0] == pytest.approx([-1, 0])
    assert sorted(report["generators"]) == ["2", "3"]


def test_holonomy_loop(capsys):
    code, out, _ = run(capsys, "holonomy", "--surface", "torus", "--weights", "1,1,1", "--loop", "3,3")
    assert code == 0
    assert json.loads(out)["loop"]["edges"] == [3, 3]


def test_holonomy_bad_signs(capsys):
    code, _, _ = run(capsys, "holonomy", "--surface", "torus", "--weights", "1,1,1", "--signs", "1,2")
    assert code == 2


def test_roundtrip(capsys):
    code, out, _ = run(capsys, "roundtrip", "--surface", "square", "--weights", "2,1,1j,3,1", "--edge", "1")
    assert code == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert set(report["flips"]) == {"1"}


def test_invariant(capsys):
    code, out, _ = run(
        capsys, "invariant", "--surface", "torus", "--weights", "1,1,1", "--path", "", "--perm", "2,3,1", "--N", "3"
    )
    assert code == 0
    assert json.loads(out)["dim"] == 9


def test_invariant_not_fixed(capsys):
    code, _, err = run(
        capsys, "invariant", "--surface", "torus", "--weights", "1,1,1", "--path", "1", "--perm", "1,2,3"
    )
    assert code == 1
    assert error_of(err)["error"] == "NotFixedPointError"


def test_normal_form(capsys):
    code, out, _ = run(capsys, "normal-form", "--surface", "triangle", "--expr", "X2 X1", "--N", "2")
    assert code == 0
    assert json.loads(out)["normal_form"] == "(-1) X1 X2"


def test_config_file(capsys, tmp_path):
    config = tmp_path / "run.yaml"
    config.write_text("N: 3\nformat: human\n")
    code, out, _ = run(capsys, "sigma", "--surface", "torus", "--config", str(config))
    assert code == 0
    report = yaml.safe_load(out)
    assert report["central"]["coefficient"] == "q^1"
    assert report["sigma"][0] == [0, 2, -2]

    code, out, _ = run(capsys, "sigma", "--surface", "torus", "--config", str(config), "--N", "2", "--format", "json")
    assert json.loads(out)["central"]["coefficient"] == "-1"
