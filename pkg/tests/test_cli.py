import json

from click.testing import CliRunner

from sabpi.cli import main
from sabpi.eval.instances import oracle_suite


def _scenario_file(tmp_path, name="sense_commit"):
    inst = {i.name: i for i in oracle_suite()}[name]
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(inst.to_json()))
    return path


def test_compile_dfa_to_json_and_dot(tmp_path):
    dot = tmp_path / "a.dot"
    res = CliRunner().invoke(main, ["compile-dfa", "--formula", "a U b", "--ap", "a,b", "--dot", str(dot)])
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert len(data["transitions"]) == 3
    assert dot.read_text().startswith("digraph")


def test_compile_dfa_reports_syntax_errors():
    res = CliRunner().invoke(main, ["compile-dfa", "--formula", "F(doo", "--ap", "door"])
    assert res.exit_code != 0


def test_plan_then_evaluate(tmp_path):
    scn = _scenario_file(tmp_path)
    policy = tmp_path / "policy.json"
    report = tmp_path / "report.json"
    runner = CliRunner()
    res = runner.invoke(main, [
        "plan", "--scenario", str(scn), "--time-limit", "30", "--k", "100",
        "--success-threshold", "0.8", "--out", str(policy), "--report", str(report),
    ])
    assert res.exit_code == 0, res.output
    assert "V=0.800000" in res.output
    assert json.loads(report.read_text())["value"] == 0.8
    traces = tmp_path / "traces.jsonl"
    res = runner.invoke(main, [
        "evaluate", "--scenario", str(scn), "--policy", str(policy),
        "--trials", "500", "--traces", str(traces),
    ])
    assert res.exit_code == 0, res.output
    out = json.loads(res.output)
    assert out["reported_value"] == 0.8 and out["trials"] == 500
    lo, hi = out["wilson95"]
    assert lo <= 0.8 <= hi
    assert len(traces.read_text().splitlines()) == 500


def test_benchmark_writes_curves(tmp_path):
    suite = tmp_path / "suite"
    suite.mkdir()
    _scenario_file(suite, "reach")
    out = tmp_path / "curves.csv"
    runs = tmp_path / "runs.csv"
    res = CliRunner().invoke(main, [
        "benchmark", "--suite", str(suite), "--seeds", "2", "--time-limit", "0.3",
        "--algorithms", "sabpi,rrt", "--grid-points", "3", "--out", str(out), "--runs-out", str(runs),
    ])
    assert res.exit_code == 0, res.output
    assert len(out.read_text().splitlines()) == 1 + 2 * 3
    assert len(runs.read_text().splitlines()) == 1 + 2 * 2


def test_benchmark_rejects_unknown_algorithms(tmp_path):
    suite = tmp_path / "suite"
    suite.mkdir()
    _scenario_file(suite, "reach")
    res = CliRunner().invoke(main, [
        "benchmark", "--suite", str(suite), "--algorithms", "astar", "--out", str(tmp_path / "x.csv"),
    ])
    assert res.exit_code != 0
