import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from linfjunta.cli import SEED_ENV, dispatch
from linfjunta.report import dumps, render

ROOT = Path(__file__).resolve().parents[1]
TWO_MODE = str(ROOT / "demos" / "two_mode.json")
SMOKE = str(ROOT / "suites" / "smoke.json")


def run(capsys, *argv):
    code = dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(text):
    return [json.loads(line) for line in text.splitlines()]


def test_junta_two_mode(capsys):
    code, out, _ = run(capsys, "junta", "--fn", TWO_MODE, "--epsilon", "0.05")
    assert code == 0
    (rec,) = records(out)
    assert rec["S"] == [0, 1] and rec["contract_met"]
    assert rec["tool"].startswith("linfjunta") and rec["seed"] == 0 and rec["conventions"]


def test_influences_schema(capsys):
    code, out, _ = run(capsys, "influences", "--fn", TWO_MODE, "--grid", "16")
    (rec,) = records(out)
    assert code == 0 and rec["dim"] == 4 and len(rec["l1"]) == 4


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--fn", TWO_MODE, "--p", "1")
    (rec,) = records(out)
    assert code == 0 and len(rec["S"]) == 1 and rec["l1_error"] > 0


@pytest.mark.parametrize("argv", [
    [],
    ["nonsense"],
    ["junta", "--fn", TWO_MODE, "--epsilon", "3"],
    ["junta", "--fn", TWO_MODE, "--epsilon", "0.1", "--mode", "certified", "--eta", "0.1"],
    ["junta", "--fn", TWO_MODE, "--epsilon", "0.1", "--grid", "8", "--samples", "10"],
    ["junta", "--fn", "/no/such/file.json", "--epsilon", "0.1"],
    ["isoperimetry", "--random-dim", "2", "--delta", "0.3"],
])
def test_usage_errors_exit_two(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_unwritable_output(capsys):
    code, _, err = run(capsys, "influences", "--fn", TWO_MODE, "--out", "/no/such/dir/out.json")
    assert code == 2 and "error" in err


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv(SEED_ENV, "17")
    _, out, _ = run(capsys, "verify", "--suite", SMOKE)
    assert all(r["seed"] == 17 for r in records(out))
    monkeypatch.setenv(SEED_ENV, "x")
    assert run(capsys, "verify", "--suite", SMOKE)[0] == 2


def test_csv_matches_json(capsys, tmp_path):
    run(capsys, "verify", "--suite", SMOKE, "--out", str(tmp_path / "r.json"))
    run(capsys, "verify", "--suite", SMOKE, "--format", "csv", "--out", str(tmp_path / "r.csv"))
    js = records((tmp_path / "r.json").read_text())
    rows = list(csv.DictReader(io.StringIO((tmp_path / "r.csv").read_text())))
    assert len(js) == len(rows) > 0
    for j, r in zip(js, rows):
        for key in ("lhs", "rhs", "slack", "half_width"):
            assert float(r[key]) == float(format(j[key], ".6g"))
        assert r["name"] == j["name"] and r["passed"] == str(j["passed"]).lower()


def test_empty_records():
    header = {"tool": "t", "seed": 1}
    assert render([], "json", header) == ""
    assert render([], "csv", header) == "tool,seed\n"


def test_non_finite_floats_are_strings():
    assert dumps({"a": float("nan"), "b": float("inf")}) == '{"a":"nan","b":"inf"}'
    assert json.loads(dumps({"x": 0.1})) == {"x": 0.1}


def test_determinism_subprocess(tmp_path):
    outs = []
    for _ in range(2):
        res = subprocess.run([sys.executable, "-m", "linfjunta", "verify", "--suite", SMOKE,
                              "--seed", "3"], capture_output=True, check=True)
        outs.append(res.stdout)
    assert outs[0] == outs[1] and outs[0]
