import json
import subprocess
import sys

import pytest

from hnnfree import cli
from hnnfree import construction as cons
from hnnfree.matmoebius import default_representation, representation_to_json


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_magnus(capsys):
    code, out, _ = run(capsys, "magnus")
    assert code == 0
    assert out.splitlines()[0] == "b2 b2 B4 b3 B4 b5 B3 B3 b2 B0"


def test_magnus_json(capsys):
    code, out, _ = run(capsys, "magnus", "--json")
    assert code == 0
    assert json.loads(out)


def test_fiber_negative(capsys):
    code, out, _ = run(capsys, "fiber", "--p", "0", "--q", "1")
    assert code == 1
    assert "NotFibered" in out


def test_fiber_positive(capsys):
    code, out, _ = run(capsys, "fiber", "--p", "1", "--q", "1")
    assert code == 0
    assert out.split() == ["1", "1", "Fibered", "6"]


def test_fiber_scan(capsys):
    code, out, _ = run(capsys, "fiber-scan", "--bound", "1")
    assert code == 0
    assert len(out.splitlines()) == 4


def test_no_arguments(capsys):
    code, _, _ = run(capsys)
    assert code == 2


def test_unknown_flag(capsys):
    code, _, _ = run(capsys, "magnus", "--frobnicate")
    assert code == 2


def test_bad_word(capsys):
    code, _, err = run(capsys, "eval-word", "--word", "ax")
    assert code == 2
    assert err


def test_eval_word(capsys):
    code, out, _ = run(capsys, "eval-word", "--word", "aabbaaBAbaBabAABBAbAAB", "--json")
    assert code == 0
    assert json.loads(out)["projective_identity"] is True


def test_relation_and_requirement(capsys):
    assert run(capsys, "relation")[0] == 0
    code, out, _ = run(capsys, "requirement")
    assert code == 0 and "sqrt(3)" in out


def test_ascend(capsys):
    code, out, _ = run(capsys, "ascend")
    assert code == 0
    assert "psi(u) = u u u" in out


def test_freeness(capsys):
    code, out, _ = run(capsys, "freeness", "--word", "b0 u b1")
    assert code == 0 and "NonTrivial" in out


def test_rep_file(tmp_path, capsys):
    path = tmp_path / "rep.json"
    path.write_text(json.dumps(representation_to_json(default_representation())))
    code, _, _ = run(capsys, "relation", "--rep", str(path))
    assert code == 0


def test_missing_rep_file(tmp_path, capsys):
    code, _, _ = run(capsys, "relation", "--rep", str(tmp_path / "nope.json"))
    assert code == 2


def test_verify_small(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"length_bound": 2, "samples": 10}))
    code, out, _ = run(capsys, "verify", "--config", str(path), "--json")
    assert code == 0
    assert json.loads(out)["verdict"] == "certified"


def test_verify_negative(capsys):
    code, out, _ = run(capsys, "verify", "--relator", "aabb", "--json")
    assert code == 1
    assert json.loads(out)["verdict"] == "negative"


def test_verify_conditional(capsys):
    code, _, _ = run(capsys, "verify", "--length-bound", "0", "--samples", "3")
    assert code == 1


def test_inconsistency_exit(monkeypatch, capsys):
    def boom(*a, **k):
        raise cons.CertificationFailure("disagreement", "NonTrivial", "identity")
    monkeypatch.setattr(cons, "full_report", boom)
    code, _, err = run(capsys, "verify")
    assert code == 3
    assert "disagreement" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hnnfree", "magnus"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "kernel rank 5" in proc.stdout


@pytest.mark.parametrize("argv", [["fiber", "--p", "1"], ["fiber-scan", "--bound", "x"]])
def test_usage_errors(argv, capsys):
    assert run(capsys, *argv)[0] == 2
