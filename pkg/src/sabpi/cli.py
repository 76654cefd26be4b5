"""Command-line entry point: ``sabpi plan | evaluate | benchmark | compile-dfa``."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .artifact import PolicyArtifact
from .eval.benchmark import convergence_report, write_rows
from .eval.executor import execute_policy, write_traces
from .ltlf import compile_text
from .model.scenario import bundled_scenarios, load_scenario
from .planner import ALGORITHMS, config_for, plan


def _algorithm(value: str) -> str:
    return value.replace("-", "_")


@click.group()
def main() -> None:
    """Observation-feedback policy synthesis for LTLf tasks under uncertain labels."""


@main.command("plan")
@click.option("--scenario", required=True, help="Scenario JSON file or bundled scenario name.")
@click.option("--algorithm", default="sabpi", type=click.Choice(["sabpi", "rrt", "mcts-pw", "mcts_pw"]))
@click.option("--time-limit", type=float, default=None, help="Seconds of planning (default 60).")
@click.option("--k", type=int, default=None, help="Explore calls per selection round.")
@click.option("--c", type=float, default=None, help="UCB exploration constant.")
@click.option("--seed", type=int, default=0)
@click.option("--success-threshold", type=float, default=None)
@click.option("--max-iterations", type=int, default=None, help="Round cap (reproducible runs).")
@click.option("--selection", type=click.Choice(["uniform", "voronoi", "mixed"]), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Policy JSON output.")
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="Report JSON output.")
def plan_cmd(scenario, algorithm, time_limit, k, c, seed, success_threshold, max_iterations, selection, out, report):
    """Synthesize a policy and print the achieved success probability."""
    scn = load_scenario(scenario)
    cfg = config_for(
        scn,
        algorithm=_algorithm(algorithm),
        time_limit=time_limit,
        k=k,
        c=c,
        seed=seed,
        success_threshold=success_threshold,
        max_iterations=max_iterations,
        selection=selection,
    )
    artifact, rep, _ = plan(scn, cfg)
    if out:
        artifact.save(out)
    if report:
        Path(report).write_text(json.dumps(rep.to_json(), indent=1))
    click.echo(
        f"{scn.name} {cfg.algorithm} seed={seed}: V={rep.value:.6f} "
        f"iterations={rep.iterations} nodes={rep.nodes} time={rep.wall_time:.1f}s ({rep.stop_reason})"
    )


@main.command("evaluate")
@click.option("--scenario", required=True)
@click.option("--policy", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--trials", type=int, default=10_000)
@click.option("--seed", type=int, default=0)
@click.option("--traces", type=click.Path(dir_okay=False), default=None, help="JSON-lines trace output.")
def evaluate_cmd(scenario, policy, trials, seed, traces):
    """Monte-Carlo success rate of a saved policy with a Wilson 95% interval."""
    scn = load_scenario(scenario)
    art = PolicyArtifact.load(policy)
    summary = execute_policy(scn, art, trials=trials, seed=seed, keep_traces=traces is not None)
    if traces:
        write_traces(traces, scn, summary.traces)
    click.echo(json.dumps({"reported_value": art.value, **summary.to_json()}, indent=1))


@main.command("benchmark")
@click.option("--suite", default=None, help="Directory of scenario JSON files (default: bundled).")
@click.option("--seeds", type=int, default=100, help="Number of seeds (0..n-1).")
@click.option("--time-limit", type=float, default=60.0)
@click.option("--algorithms", default="sabpi,rrt,mcts-pw", help="Comma-separated list.")
@click.option("--grid-points", type=int, default=13)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="CSV output.")
@click.option("--runs-out", type=click.Path(dir_okay=False), default=None, help="Per-run CSV output.")
def benchmark_cmd(suite, seeds, time_limit, algorithms, grid_points, out, runs_out):
    """Anytime curves (median and quartiles over seeds) for each scenario and algorithm."""
    if suite:
        files = sorted(Path(suite).glob("*.json"))
        if not files:
            raise click.UsageError(f"no scenario files in {suite}")
        scenarios = [load_scenario(f) for f in files]
    else:
        scenarios = [load_scenario(n) for n in bundled_scenarios()]
    algos = [_algorithm(a.strip()) for a in algorithms.split(",") if a.strip()]
    unknown = set(algos) - set(ALGORITHMS)
    if unknown:
        raise click.UsageError(f"unknown algorithms {sorted(unknown)}")
    first = True
    for scn in scenarios:
        cfg = config_for(scn, time_limit=time_limit)

        def progress(algo, seed, rep, name=scn.name):
            click.echo(f"{name} {algo} seed={seed}: V={rep.value:.4f}", err=True)

        result = convergence_report(scn, cfg, range(seeds), algos, grid_points, progress)
        result.write_csv(out, append=not first)
        if runs_out:
            write_rows(
                runs_out,
                (
                    {"scenario": scn.name, "algorithm": a, "seed": r.seed, "value": r.value,
                     "iterations": r.iterations, "nodes": r.nodes, "wall_time": r.wall_time}
                    for a, reps in result.reports.items()
                    for r in reps
                ),
                append=not first,
            )
        first = False
    click.echo(f"wrote {out}")


@main.command("compile-dfa")
@click.option("--formula", required=True)
@click.option("--ap", required=True, help="Comma-separated atomic propositions.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="JSON output (default stdout).")
@click.option("--dot", type=click.Path(dir_okay=False), default=None, help="Also write Graphviz DOT text.")
@click.option("--state-budget", type=int, default=4096)
def compile_dfa_cmd(formula, ap, out, dot, state_budget):
    """Compile an LTLf formula to a minimized DFA."""
    props = [p.strip() for p in ap.split(",") if p.strip()]
    dfa = compile_text(formula, props, state_budget=state_budget)
    text = json.dumps(dfa.to_json(), indent=1)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text)
    if dot:
        Path(dot).write_text(dfa.to_dot())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
