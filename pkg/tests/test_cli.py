import csv
import io
import json
import subprocess
import sys

import pytest

from uncrel import __version__
from uncrel.cli import main, parse_z_grid
from uncrel.errors import ParseError
from uncrel.io import load_problem, parse_problem, verdicts_from_report
from uncrel.relations import evaluate_all

SX = [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]
SY = [[[0, 0], [0, -1]], [[0, 1], [0, 0]]]
SZ = [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]
UP = [[1, 0], [0, 0]]


def problem(observables, state=UP, **extra):
    data = {"dim": len(state), "observables": [{"name": n, "matrix": m} for n, m in observables], "state": state}
    data.update(extra)
    return data


@pytest.fixture
def write(tmp_path):
    def _write(data, name="p.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_pauli_pair(capsys, write):
    code, out, _ = run(capsys, "check", write(problem([("sx", SX), ("sy", SY)])))
    assert code == 0
    report = json.loads(out)
    assert report["version"] == __version__
    assert report["all_hold"] is True
    assert len(report["input_digest"]) == 16
    assert [v["relation"] for v in report["verdicts"]][:2] == ["RS_PAIR", "HR_PAIR"]
    (pair,) = report["pairs"]
    assert pair["covariance"] == [0.0, 1.0]
    assert pair["commutator_expectation"] == [0.0, 2.0]
    assert pair["pearson"] == 1.0
    assert report["correlation_matrix"]["determinant"] == 0.0
    assert report["entanglement"]["pair_flags"] == [{"pair": [0, 1], "entangled": True}]
    assert report["critical"]["eigen_flags"] == [False, False]


def test_check_report_round_trip(capsys, write, tmp_path):
    path = write(problem([("sx", SX), ("sy", SY), ("sz", SZ)], state=[[0.8660254037844386, 0], [0.5, 0]]))
    out_path = tmp_path / "report.json"
    code, out, _ = run(capsys, "check", path, "--out", str(out_path))
    assert code == 0 and out == ""
    report = json.loads(out_path.read_text())
    p = load_problem(path)
    direct = evaluate_all(p.observables, p.state, p.tol).verdicts
    assert verdicts_from_report(report) == direct


def test_check_is_deterministic(capsys, write):
    path = write(problem([("sx", SX), ("sy", SY), ("sz", SZ)]))
    first = run(capsys, "check", path)[1]
    second = run(capsys, "check", path)[1]
    assert first == second


def test_check_eigenstate_skips_and_nulls(capsys, write):
    code, out, _ = run(capsys, "check", write(problem([("sx", SX), ("sy", SY), ("sz", SZ)])))
    assert code == 0
    report = json.loads(out)
    assert report["correlation_matrix"] is None
    assert report["skipped"]
    assert "RS_TRIPLE" in report["critical"]["trivial_relations"]


def test_check_text_and_relation_subset(capsys, write):
    code, out, _ = run(capsys, "check", write(problem([("sx", SX), ("sy", SY)])), "--format", "text", "--relations", "RS_PAIR,hr_pair")
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith("ok")]
    assert len(lines) == 2
    assert "all relations hold" in out


def test_check_malformed_matrix(capsys, write):
    bad = [[[0, 0], [1, 0], [0, 0]], [[1, 0], [0, 0]]]
    code, _, err = run(capsys, "check", write(problem([("sx", bad)])))
    assert code == 1
    assert "observables[0].matrix[0]" in err


def test_check_non_hermitian(capsys, write):
    m = [[[0, 0], [1, 0]], [[3, 0], [0, 0]]]
    code, _, err = run(capsys, "check", write(problem([("m", m)])))
    assert code == 1
    assert "not Hermitian" in err and "= 2" in err


def test_parse_errors_name_paths():
    with pytest.raises(ParseError) as info:
        parse_problem(problem([("sx", SX)], state=[[1, 0], [0]]))
    assert info.value.path == "state[1]"
    with pytest.raises(ParseError) as info:
        parse_problem({"dim": 2, "observables": [], "state": UP})
    assert info.value.path == "observables"
    with pytest.raises(ParseError) as info:
        parse_problem(problem([("sx", SX)], tol={"bogus": 1}))
    assert info.value.path == "tol.bogus"
    with pytest.raises(ParseError) as info:
        parse_problem(problem([("sx", SX)], state=[[2, 0], [0, 0]]))
    assert info.value.path == "state"


def test_tol_override_in_file_and_flag(capsys, write):
    p = parse_problem(problem([("sx", SX)], tol={"rel": 1e-6}))
    assert p.tol.rel == 1e-6
    code, out, _ = run(capsys, "check", write(problem([("sx", SX), ("sy", SY)])), "--tol", "1e-3")
    assert json.loads(out)["tolerances"]["rel"] == 1e-3


def test_bad_usage_exits_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["check", "x.json", "--tol", "-1"])
    assert info.value.code == 1


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "check", str(tmp_path / "nope.json"))
    assert code == 1


def test_region_quarter_disc(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, err = run(capsys, "region", "--r12", "0", "--step", "0.01", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 101**2
    frac = sum(r["feasible"] == "1" for r in rows) / len(rows)
    assert abs(frac - 0.785398) < 0.01


def test_region_r12_one(capsys):
    code, out, _ = run(capsys, "region", "--r12", "1", "--step", "0.01")
    assert code == 0
    for r in csv.DictReader(io.StringIO(out)):
        if r["feasible"] == "1":
            assert r["r13"] == r["r23"]


def test_region_out_of_range(capsys):
    assert run(capsys, "region", "--r12", "1.5", "--step", "0.01")[0] == 1
    assert run(capsys, "region", "--r12", "0.5", "--step", "0.25")[0] == 1


def test_survey_command(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["survey", "--dim", "2", "--observables", "3", "--samples", "1000", "--seed", "7"]
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b), "--workers", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["violations"] == []


def test_survey_empty_and_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("UNCREL_SEED", "123")
    code, out, _ = run(capsys, "survey", "--dim", "3", "--samples", "0")
    assert code == 0
    report = json.loads(out)
    assert report["spec"]["seed"] == 123
    assert report["violations"] == []
    monkeypatch.setenv("UNCREL_SEED", "abc")
    assert run(capsys, "survey", "--dim", "3", "--samples", "0")[0] == 1


def test_survey_bad_spec(capsys):
    assert run(capsys, "survey", "--dim", "1")[0] == 1
    assert run(capsys, "survey", "--dim", "3", "--kind", "pauli_fixed")[0] == 1


def test_survey_violation_exit_code(capsys):
    # an absurdly tight r = 1 tolerance turns rounding noise in the qubit check into violations
    code, out, err = run(capsys, "survey", "--dim", "2", "--samples", "50", "--seed", "1", "--eps-intel", "1e-300")
    report = json.loads(out)
    assert report["violations"]
    assert code == 2
    assert "violations" in err


def test_intelligent_command(capsys, write):
    path = write(problem([("sx", SX), ("sy", SY)]))
    code, out, _ = run(capsys, "intelligent", path, "--z-re", "0", "--z-im", "1")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["results"]) == 1
    res = payload["results"][0]
    assert res["degenerate"] is False and res["r_value"] == pytest.approx(1.0)
    code, out, _ = run(capsys, "intelligent", path, "--z-grid", "re=-1:1:0.5,im=-1:1:0.5")
    assert code == 0
    payload = json.loads(out)
    assert payload["z_points"] == 25
    residuals = [r["residual"] for r in payload["results"] if not r["degenerate"]]
    assert residuals == sorted(residuals)


def test_intelligent_arity(capsys, write):
    code, _, err = run(capsys, "intelligent", write(problem([("sx", SX), ("sy", SY), ("sz", SZ)])), "--z-im", "1")
    assert code == 1
    assert "exactly 2" in err


def test_z_grid_parsing():
    assert len(parse_z_grid("re=-1:1:0.5,im=-1:1:0.5")) == 25
    assert parse_z_grid("re=0:0.3:0.1") == [0j, 0.1 + 0j, 0.2 + 0j, 0.3 + 0j]
    with pytest.raises(ParseError):
        parse_z_grid("re=1:0:0.5")
    with pytest.raises(ParseError):
        parse_z_grid("x=0:1:1")


def test_help_and_entry_point():
    proc = subprocess.run([sys.executable, "-m", "uncrel.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for flag in ("check", "region", "survey", "intelligent"):
        assert flag in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "uncrel.cli", "survey", "--help"], capture_output=True, text=True)
    assert "UNCREL_SEED" in proc.stdout
