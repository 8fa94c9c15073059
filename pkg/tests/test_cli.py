import json

import pytest

from klfrob import __version__
from klfrob.cli import main


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([*argv, "--out", str(out)])
    return code, out


def test_carlitz_example(tmp_path):
    code, out = run(tmp_path, "verify-identity", "carlitz", "--p", "2", "--smax", "4")
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["pass"] and rep["version"] == __version__
    assert rep["invocation"][:2] == ["klfrob", "verify-identity"]


def test_trace_check_example(tmp_path):
    code, out = run(tmp_path, "frobenius-trace-check", "--group", "gl", "--n", "2", "--p", "3")
    assert code == 0
    rows = json.loads(out.read_text())["result"]["rows"]
    assert len(rows) == 2 and all(r["pass"] for r in rows)


def test_newton_polygon_example(tmp_path):
    out = tmp_path / "np.csv"
    code = main(["newton-polygon", "--family", "kl", "--n", "3", "--q", "4", "--a", "all",
                 "--format", "csv", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# invocation")
    assert lines[1] == "a,slopes,hodge,ordinary"
    assert len(lines) == 5
    assert all(line.split(",")[1] == "0 1 2" for line in lines[2:])


@pytest.mark.parametrize("argv", [
    ["kloosterman", "--p", "4", "--n", "2"],
    ["kloosterman", "--p", "3", "--n", "2", "--a", "7"],
    ["verify-identity", "carlitz", "--p", "3"],
    ["verify-identity", "nonsense", "--p", "2"],
    ["newton-polygon", "--family", "f_d", "--p", "5", "--d", "3"],
    ["frobenius-trace-check", "--group", "hyp", "--n", "2", "--p", "3"],
    ["gauss", "--p", "2"],
    ["unknown-command"],
    ["kloosterman", "--p", "3", "--n", "2", "--bogus-flag"],
])
def test_usage_errors(tmp_path, argv, capsys):
    assert main([*argv, "--out", str(tmp_path / "x.json")] if argv[0] != "unknown-command" else argv) == 2


def test_failure_writes_counterexample(tmp_path):
    # precision 30 cannot be reached with M = 24, so the check must fail
    code, out = run(tmp_path, "frobenius-trace-check", "--group", "gl", "--n", "2", "--p", "3",
                    "--D", "32", "--required", "30")
    assert code == 1
    assert not json.loads(out.read_text())["pass"]
    cex = json.loads((tmp_path / "report.counterexample.json").read_text())
    assert cex["counterexample"]["required"] == 30
    assert cex["counterexample"]["pass"] is False
    assert cex["invocation"][1] == "frobenius-trace-check"


def test_byte_stable_output(tmp_path):
    out = tmp_path / "a.json"
    argv = ["kloosterman", "--p", "3", "--s", "2", "--n", "3", "--out", str(out)]
    assert main(argv) == 0
    first = out.read_bytes()
    assert main(argv) == 0
    assert out.read_bytes() == first


def test_worker_count_does_not_change_values(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["kloosterman", "--p", "5", "--n", "4", "--a", "1-4"]
    assert main([*base, "--out", str(a)]) == 0
    assert main([*base, "--workers", "2", "--out", str(b)]) == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert ra["result"] == rb["result"]


@pytest.mark.parametrize("argv", [
    ["gauss", "--p", "5"],
    ["hyp", "--p", "3", "--n", "3", "--a", "1"],
    ["so-sum", "--p", "3", "--n", "2"],
    ["so-sum", "--p", "2", "--n", "3", "--model", "quadric"],
    ["dwork-congruence", "--family", "mixed", "--R", "64", "--smax", "4", "--theorem-smax", "3",
     "--ratio-degree", "32"],
    ["unit-root", "--group", "so", "--n", "1"],
    ["lpoly", "--family", "f_d", "--p", "3", "--n", "1", "--extra-sums", "2"],
    ["lpoly", "--family", "hyp", "--p", "3", "--n", "1"],
    ["frobenius-solve", "--group", "so", "--n", "1", "--p", "3", "--D", "32"],
])
def test_subcommands_succeed(tmp_path, argv):
    code, out = run(tmp_path, *argv)
    assert code == 0
    assert json.loads(out.read_text())["pass"]


def test_verify_all_quick(tmp_path, capsys):
    code, out = run(tmp_path, "verify-all", "--profile", "quick", "--criteria", "1,2,3,4,8")
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["result"]["mutation_check"]["detected"]
    assert all(c["pass"] for c in rep["result"]["criteria"])
    assert all("runtime_s" in c and "budget_s" in c for c in rep["result"]["criteria"])
    err = capsys.readouterr().err
    assert "criterion  1 PASS" in err
