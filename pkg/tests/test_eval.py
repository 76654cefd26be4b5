import pytest

from fixtures import fire_site
from sabpi.artifact import PolicyArtifact
from sabpi.eval.benchmark import convergence_report, value_at
from sabpi.eval.executor import (
    EXHAUSTED,
    SATISFIED,
    PolicyMismatchError,
    execute_policy,
    wilson_interval,
)
from sabpi.eval.instances import oracle_suite
from sabpi.eval.oracle import OracleBudgetError, OracleInstance, oracle_optimal_value
from sabpi.planner import PlannerConfig, sabpi_plan

SUITE = {inst.name: inst for inst in oracle_suite()}

FROZEN = {
    "reach": 1.0,
    "avoid_wall": 1.0,
    "sense_commit": 0.8,
    "blind_commit": 0.7,
    "two_keys": 1.0,
    "two_sensors": 0.9,
    "visit_both": 1.0,
    "risky_corridor": 0.7,
    "fork": 0.759,
    "two_rocks": 0.716,
}


# ---------------------------------------------------------------- oracle
@pytest.mark.parametrize("name", ["reach", "sense_commit", "blind_commit"])
def test_hand_derived_oracle_values(name):
    inst = SUITE[name]
    assert oracle_optimal_value(inst) == pytest.approx(inst.expected, abs=1e-12)


def test_suite_values_are_frozen():
    assert len(SUITE) == 10
    values = {name: round(oracle_optimal_value(inst), 4) for name, inst in SUITE.items()}
    assert values == FROZEN


def test_short_horizon_cannot_do_better():
    inst = SUITE["sense_commit"]
    # sensing and then committing needs two events; one event only allows a blind guess
    assert oracle_optimal_value(inst, horizon=1) == pytest.approx(0.5)


def test_oracle_budgets():
    with pytest.raises(OracleBudgetError):
        OracleInstance(name="big", width=8, height=8, ap=["g"], formula="F(g)", start=(0, 0), regions=[])
    with pytest.raises(OracleBudgetError):
        OracleInstance(name="long", width=2, height=2, ap=["g"], formula="F(g)", start=(0, 0),
                       regions=[], horizon=13)


# -------------------------------------------------------------- executor
def test_wilson_interval_matches_the_closed_form():
    lo, hi = wilson_interval(80, 100)
    assert round(lo, 4) == 0.7112 and round(hi, 4) == 0.8666


def _planned(scn, **cfg):
    art, rep, _ = sabpi_plan(scn, PlannerConfig(**cfg))
    return art, rep


def test_certain_policy_never_fails():
    scn = SUITE["reach"].to_scenario()
    art, rep = _planned(scn, seed=0, time_limit=30.0, k=50)
    assert rep.value == 1.0
    summary = execute_policy(scn, art, trials=200, seed=1)
    assert summary.rate == 1.0 and summary.verdicts == {SATISFIED: 200}


def test_monte_carlo_agrees_with_the_analytic_value():
    scn = SUITE["sense_commit"].to_scenario()
    art, rep = _planned(scn, seed=0, time_limit=30.0, k=100, success_threshold=0.8)
    assert art.analytic_value() == pytest.approx(rep.value, abs=1e-12)
    summary = execute_policy(scn, art, trials=4000, seed=2)
    assert abs(summary.rate - rep.value) <= summary.margin + 1e-9


def test_unfinished_policy_counts_as_failure():
    scn = fire_site(prior_fire=0.5, accuracy=0.8, formula="F(site) & G(site -> fire)")
    art, rep = _planned(scn, seed=0, k=5, max_iterations=1, time_limit=30.0)
    summary = execute_policy(scn, art, trials=50, seed=0)
    assert summary.verdicts.get(EXHAUSTED, 0) + summary.successes + summary.verdicts.get("violated", 0) == 50


def test_execution_is_seeded():
    scn = SUITE["blind_commit"].to_scenario()
    art, _ = _planned(scn, seed=3, time_limit=30.0, k=100, success_threshold=0.7)
    a = execute_policy(scn, art, trials=300, seed=9)
    b = execute_policy(scn, art, trials=300, seed=9)
    assert a.to_json() == b.to_json()


def test_policy_from_another_scenario_is_rejected():
    art, _ = _planned(SUITE["reach"].to_scenario(), seed=0, time_limit=5.0, k=20)
    with pytest.raises(PolicyMismatchError):
        execute_policy(SUITE["sense_commit"].to_scenario(), art, trials=1)


def test_traces_are_recorded_on_request():
    scn = SUITE["reach"].to_scenario()
    art, _ = _planned(scn, seed=0, time_limit=30.0, k=50)
    summary = execute_policy(scn, art, trials=3, seed=0, keep_traces=True)
    assert len(summary.traces) == 3
    assert all(tr.events and tr.events[-1].event == "hit_region" for tr in summary.traces)


# -------------------------------------------------------------- artifact
def test_artifact_round_trip(tmp_path):
    scn = SUITE["sense_commit"].to_scenario()
    art, rep = _planned(scn, seed=1, time_limit=30.0, k=100, success_threshold=0.8)
    path = tmp_path / "policy.json"
    art.save(path)
    again = PolicyArtifact.load(path)
    assert again.to_json() == art.to_json()
    assert again.analytic_value() == art.analytic_value()
    assert again.observation_regions_used() == art.observation_regions_used() == [0]
    assert again.first_region() == art.first_region()


# ------------------------------------------------------------- benchmark
def test_value_at_reads_a_step_curve():
    curve = [(0.0, 0.0), (1.0, 0.3), (2.5, 0.7)]
    assert [value_at(curve, t) for t in (0.0, 0.99, 1.0, 2.0, 9.0)] == [0.0, 0.0, 0.3, 0.3, 0.7]


def test_one_curve_per_seed():
    scn = SUITE["blind_commit"].to_scenario()
    rep = convergence_report(scn, PlannerConfig(time_limit=0.5, k=20), seeds=[0, 1, 2],
                             algorithms=["sabpi", "rrt"], grid_points=5)
    assert len(rep.curves("sabpi")) == 3 and len(rep.curves("rrt")) == 3
    assert rep.time_grid == [0.0, 0.125, 0.25, 0.375, 0.5]
    rows = rep.table()
    assert len(rows) == 10
    assert all(r["q1"] <= r["median"] <= r["q3"] for r in rows)


def test_zero_budget_gives_only_the_initial_point():
    scn = SUITE["blind_commit"].to_scenario()
    rep = convergence_report(scn, PlannerConfig(time_limit=0.0), seeds=[0])
    assert rep.time_grid == [0.0]
    (curve,) = rep.curves("sabpi")
    assert curve == [(0.0, 0.0)]


def test_csv_output(tmp_path):
    scn = SUITE["reach"].to_scenario()
    rep = convergence_report(scn, PlannerConfig(time_limit=0.2, k=10), seeds=[0], grid_points=3)
    path = tmp_path / "curves.csv"
    rep.write_csv(path)
    rep.write_csv(path, append=True)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("scenario,algorithm,time,median")
    assert len(lines) == 1 + 2 * 3
