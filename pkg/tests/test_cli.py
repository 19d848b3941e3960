import json
import os
import subprocess
import sys

import pytest

from elimvote.cli import main, parse_tiebreak
from elimvote.profile import ELIMINATE_EARLIEST, Profile

VOTES = "candidates: a, b, c\n3: a > b > c\n2: b > c > a\n2: c > b > a\n"


@pytest.fixture
def votes(tmp_path):
    path = tmp_path / "a.votes"
    path.write_text(VOTES)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_json_and_text(capsys, votes):
    code, out, _ = run(capsys, "run", "--rule", "stv", "--profile", votes)
    assert code == 0
    data = json.loads(out)
    assert data["winner"] == "b" and len(data["rounds"]) == 2
    code, out, _ = run(capsys, "run", "--rule", "stv", "--profile", votes, "--format", "text")
    lines = out.strip().splitlines()
    assert lines[1].startswith("round 1 | remaining: a,b,c")
    assert lines[-1] == "winner: b"


def test_run_is_deterministic(capsys, votes):
    outs = {run(capsys, "run", "--rule", "nanson", "--profile", votes)[1] for _ in range(3)}
    assert len(outs) == 1


def test_tiebreak_flag_changes_winner(capsys, tmp_path):
    path = tmp_path / "t.votes"
    path.write_text("candidates: a, b\n1: a > b\n1: b > a\n")
    _, out1, _ = run(capsys, "run", "--rule", "stv", "--profile", str(path), "--tiebreak", "earliest:a,b")
    _, out2, _ = run(capsys, "run", "--rule", "stv", "--profile", str(path), "--tiebreak", "latest:a,b")
    assert json.loads(out1)["winner"] == "b" and json.loads(out2)["winner"] == "a"
    path.write_text("# tiebreak: earliest:a,b\ncandidates: a, b\n1: a > b\n1: b > a\n")
    _, out3, _ = run(capsys, "run", "--rule", "stv", "--profile", str(path))
    assert json.loads(out3)["winner"] == "b"


def test_parse_tiebreak():
    p = Profile.from_rankings("abc", [["a", "b", "c"]])
    pol = parse_tiebreak("earliest:c", p)
    assert pol.convention == ELIMINATE_EARLIEST and pol.priority == (2, 0, 1)
    assert parse_tiebreak(None, p, "b").optimistic_for == 1


def test_manipulate_exit_codes(capsys, votes):
    code, out, _ = run(capsys, "manipulate", "--rule", "stv", "--profile", votes, "--prefer", "c", "--k", "1")
    assert code == 0 and json.loads(out)["decision"] == "yes"
    code, out, _ = run(capsys, "manipulate", "--rule", "eliminate:veto", "--profile", votes, "--prefer", "a",
                       "--k", "0")
    assert code == 1 and json.loads(out)["decision"] == "no"
    code, _, err = run(capsys, "manipulate", "--rule", "baldwin", "--profile", votes, "--prefer", "c", "--k", "4",
                       "--budget", "5")
    assert code == 3 and "budget" in err


def test_manipulate_sequential(capsys, tmp_path):
    out = tmp_path / "e2.votes"
    assert main(["gen", "example2", "--out", str(out)]) == 0
    code, text, _ = run(capsys, "manipulate", "--rule", "sequential:plurality", "--profile", str(out),
                        "--prefer", "p", "--solver", "sequential", "--format", "text")
    assert code == 0
    assert text.splitlines()[0] == "decision: yes"
    assert "round 1: a >" in text
    code, _, _ = run(capsys, "manipulate", "--rule", "stv", "--profile", str(out), "--prefer", "p",
                     "--solver", "sequential")
    assert code == 2


def test_usage_errors(capsys, tmp_path, votes):
    assert run(capsys, "run", "--rule", "nonsense", "--profile", votes)[0] == 2
    assert run(capsys, "run", "--rule", "stv", "--profile", str(tmp_path / "missing"))[0] == 2
    bad = tmp_path / "bad.votes"
    bad.write_text("candidates: a, b\n1: a > z\n")
    code, _, err = run(capsys, "run", "--rule", "stv", "--profile", str(bad))
    assert code == 2 and "line 2" in err
    assert run(capsys, "run", "--rule", "stv")[0] == 2
    assert run(capsys, "run", "--rule", "stv", "--profile", votes, "--tiebreak", "sideways:a")[0] == 2


def test_reduce_and_oracle(capsys, tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({"n": 3, "sets": [[1, 2, 3]]}))
    code, out, _ = run(capsys, "oracle", "cover", "--instance", str(inst))
    assert code == 0 and json.loads(out) == {"cover": [1]}
    code, _, _ = run(capsys, "reduce", "cover2veto", "--instance", str(inst), "--out", str(tmp_path / "red"))
    assert code == 0
    files = sorted(os.listdir(tmp_path / "red"))
    assert files == ["reduction.json", "reduction.votes"]
    side = json.loads((tmp_path / "red" / "reduction.json").read_text())
    votes = str(tmp_path / "red" / "reduction.votes")
    code, out, _ = run(capsys, "run", "--rule", "eliminate:veto", "--profile", votes, "--tiebreak",
                       "@" + str(tmp_path / "red" / "reduction.json"))
    assert code == 0 and json.loads(out)["winner"] != side["preferred"]
    code, out, _ = run(capsys, "manipulate", "--rule", "eliminate:veto", "--profile", votes, "--prefer", "p")
    assert code == 0 and json.loads(out)["decision"] == "yes"
    inst.write_text("{\"n\": 3}")
    assert run(capsys, "oracle", "cover", "--instance", str(inst))[0] == 2


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "thm5", "--n", "3")
    assert code == 0 and out.strip().endswith("result: pass")
    assert all(l.startswith(("suite:", "PASS", "result:")) for l in out.strip().splitlines())
    code, out, _ = run(capsys, "verify", "thm3", "--format", "json")
    assert code == 0 and json.loads(out)["passed"]


def test_gen_random_is_seeded(capsys):
    a = run(capsys, "gen", "random", "--m", "4", "--voters", "9", "--seed", "5")[1]
    b = run(capsys, "gen", "random", "--m", "4", "--voters", "9", "--seed", "5")[1]
    assert a == b and a.startswith("# seed: 5")
    assert run(capsys, "gen", "random", "--m", "4")[0] == 2


def test_out_file_written_atomically(capsys, tmp_path, votes):
    target = tmp_path / "deep" / "trace.json"
    assert main(["run", "--rule", "coombs", "--profile", votes, "--out", str(target)]) == 0
    assert json.loads(target.read_text())["rule"] == "coombs"
    assert sorted(os.listdir(target.parent)) == ["trace.json"]


def test_budget_env_var(tmp_path, votes):
    env = dict(os.environ, ELIMVOTE_BUDGET="3")
    proc = subprocess.run([sys.executable, "-m", "elimvote.cli", "manipulate", "--rule", "baldwin", "--profile",
                           votes, "--prefer", "c", "--k", "3"], env=env, capture_output=True, text=True)
    assert proc.returncode == 3
