import json
import subprocess
import sys

import pytest

from nonsplit.cli import REPORT_DIR_ENV, main
from nonsplit.io import read_tensor, write_json
from nonsplit.model import build_model
from nonsplit.tensors import EndoTensor


@pytest.fixture(autouse=True)
def _no_report_dir(monkeypatch):
    monkeypatch.delenv(REPORT_DIR_ENV, raising=False)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_example_kinds(tmp_path, capsys):
    for kind in ("acs", "metric", "JR", "gR", "Y_eta", "W_eta"):
        path = tmp_path / f"{kind}.json"
        code, _, _ = run(["build-example", "--n", "2", "--kind", kind, "--out", str(path)], capsys)
        assert code == 0
        read_tensor(path)
    code, out, _ = run(["build-example", "--n", "1", "--kind", "model"], capsys)
    assert code == 0 and json.loads(out)["p"] == 2


def test_check_exit_codes(tmp_path, capsys):
    good = tmp_path / "g.json"
    run(["build-example", "--n", "2", "--kind", "metric", "--out", str(good)], capsys)
    code, out, _ = run(["check", str(good)], capsys)
    assert code == 0 and json.loads(out)["valid"] is True
    bad = tmp_path / "b.json"
    write_json(bad, EndoTensor.identity(2, 2).to_json())   # squares to +Id
    code, out, _ = run(["check", str(bad)], capsys)
    assert code == 3 and json.loads(out)["valid"] is False


def test_split_exit_codes(tmp_path, capsys):
    jr = tmp_path / "jr.json"
    run(["build-example", "--n", "2", "--kind", "JR", "--out", str(jr)], capsys)
    code, out, _ = run(["split", str(jr)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["structure"] == "acs" and all(s["status"] == "split" for s in rep["steps"])


def test_split_obstructed_within_bound(tmp_path, capsys):
    from nonsplit.algebra import Superfunction
    from nonsplit.fields import SuperVectorField, exp_automorphism
    from nonsplit.tensors import pullback_acs
    x = Superfunction.even_var(2, 2, 0)
    xi = [Superfunction.odd_var(2, 2, j) for j in range(2)]
    zeta = SuperVectorField.frame(2, 2, 0, x * x * xi[0] * xi[1])
    path = tmp_path / "obs.json"
    write_json(path, pullback_acs(exp_automorphism(zeta), build_model(1).JR).to_json())
    code, out, _ = run(["split", str(path), "--degree-bound", "0", "--points", "2"], capsys)
    assert code == 2
    step = json.loads(out)["steps"][-1]
    assert step["status"] == "obstructed" and "qualifier" in step["certificate"]
    assert len(step["certificate"]["pairing"]["points"]) == 2


def test_invalid_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{bad")
    for cmd in (["split", str(bad)], ["check", str(bad)], ["check", str(tmp_path / "missing.json")]):
        code, _, err = run(cmd, capsys)
        assert code == 3 and "invalid input" in err


@pytest.mark.parametrize("argv", [
    ["suite", "--n", "0"], ["suite", "--n", "2", "--suites", "bogus"], ["frobnicate"], [],
    ["eval", "--n", "3", "--points", "[[1, 2]]"], ["build-example", "--kind", "spinor"],
])
def test_usage_errors(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 4


def test_eval_certificates(capsys):
    code, out, _ = run(["eval", "--n", "3", "--points", "3"], capsys)
    data = json.loads(out)
    assert code == 0 and all(data["identities"].values()) and len(data["points"]) == 3
    code, _, err = run(["eval", "--n", "2"], capsys)
    assert code == 3 and "theorem hypothesis violated" in err


def test_eval_tensor_at_explicit_points(tmp_path, capsys):
    path = tmp_path / "y.json"
    run(["build-example", "--n", "1", "--kind", "Y_eta", "--out", str(path)], capsys)
    code, out, _ = run(["eval", str(path), "--points", '[[1, "1/2"]]'], capsys)
    assert code == 0 and json.loads(out)["points"][0]["point"] == ["1", "1/2"]


def test_suite_command_and_report_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(REPORT_DIR_ENV, str(tmp_path))
    code, out, _ = run(["suite", "--n", "2", "--suites", "deformation", "--out", "r.json"], capsys)
    assert code == 0 and "overall: PASS" in out
    first = (tmp_path / "r.json").read_bytes()
    main(["suite", "--n", "2", "--suites", "deformation", "--out", "r.json"])
    assert (tmp_path / "r.json").read_bytes() == first
    code, _, _ = run(["suite", "--n", "2", "--suites", "lemma", "--samples", "1"], capsys)
    assert code == 1 and (tmp_path / "suite-report.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nonsplit", "build-example", "--n", "1",
                           "--kind", "JR", "--out", str(tmp_path / "jr.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "nonsplit", "split", str(tmp_path / "jr.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["structure"] == "acs"
