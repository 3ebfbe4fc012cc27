"""Command-line interface composing the compiler, solver, oracles and service.

Exit codes: 0 success, 1 usage, 2 validation failure, 3 solver failure,
4 oracle mismatch.  Machine-readable output goes to stdout, diagnostics to
stderr.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .encode import EncodingError, compile_task
from .extract import extract_graph, extract_solution, graph_payload, result_bundle, to_dot
from .generalize import GeneralizeError, generalize_task, generalized_payload
from .graphs import build_abstract, minimize
from .model import TaskSpec
from .oracle import OracleError, brute_force_abduce, check_general_solution
from .parse import ParseError, parse_atom_text, parse_rules, parse_task
from .solver import SolverConfig, solve

USAGE_EXIT = 1
VALIDATION_EXIT = 2
SOLVER_EXIT = 3
MISMATCH_EXIT = 4


def _fail(code: int, message: str) -> None:
    click.echo(message, err=True)
    sys.exit(code)


def _load_rules(rules_path: str):
    text = Path(rules_path).read_text()
    parsed = parse_rules(text, file=rules_path)
    for d in parsed.diagnostics:
        click.echo(d.render(), err=True)
    if not parsed.ok:
        sys.exit(VALIDATION_EXIT)
    return parsed.value


def _load_task(task_path: str, rules, overrides: dict) -> TaskSpec:
    raw = Path(task_path).read_text()
    if overrides:
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            _fail(VALIDATION_EXIT, f"{task_path}: invalid JSON: {exc.msg}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        extra_facts = overrides.get("__facts__") or ()
        if extra_facts:
            data.setdefault("facts", [])
            data["facts"] = list(data["facts"]) + [f for f in extra_facts if f not in data["facts"]]
        data.pop("__facts__", None)
        raw = json.dumps(data)
    parsed = parse_task(raw, rules, file=task_path)
    for d in parsed.diagnostics:
        click.echo(d.render(), err=True)
    if not parsed.ok:
        sys.exit(VALIDATION_EXIT)
    return parsed.value


def _task_overrides(depth, variant, fact) -> dict:
    overrides: dict = {}
    if depth is not None:
        overrides["depth"] = depth
    if variant is not None:
        overrides["variant"] = variant
    if fact:
        overrides["__facts__"] = list(fact)
    return overrides


def _solver_config(ctx) -> SolverConfig:
    opts = ctx.obj
    kwargs = {}
    if opts.get("solver_path"):
        kwargs["executable"] = opts["solver_path"]
    kwargs["timeout_seconds"] = opts.get("timeout") or 60.0
    kwargs["enumerate_all_optimal"] = opts.get("all_optimal", True)
    return SolverConfig(**kwargs)


def _compile(task: TaskSpec, justification: bool):
    try:
        return compile_task(task, include_justification=justification)
    except EncodingError as exc:
        _fail(VALIDATION_EXIT, f"encoding error: {exc}")


def _solve_or_die(ctx, program):
    opts = ctx.obj
    keep = opts.get("keep_program")
    if keep:
        Path(keep).write_text(program.text)
    result = solve(program, _solver_config(ctx))
    if result.status in ("timeout", "solverError"):
        _fail(SOLVER_EXIT, f"solver failure ({result.status}):\n{result.raw_output[:800]}")
    return result


@click.group()
@click.option("--solver-path", default=None, help="Clingo-compatible executable to run.")
@click.option("--timeout", type=float, default=None, help="Solver timeout in seconds.")
@click.option("--all-optimal/--single", default=True, help="Enumerate all optimal models.")
@click.option("--keep-program", type=click.Path(), default=None, help="Dump the derived program to a file.")
@click.pass_context
def cli(ctx, solver_path, timeout, all_optimal, keep_program):
    """Abductive proof generation workbench."""
    ctx.obj = {
        "solver_path": solver_path,
        "timeout": timeout,
        "all_optimal": all_optimal,
        "keep_program": keep_program,
    }


@cli.command()
@click.argument("rules_path", type=click.Path(exists=True))
@click.argument("task_path", type=click.Path(exists=True), required=False)
def validate(rules_path, task_path):
    """Check a rule file (and optionally a task file) against the input fragment."""
    text = Path(rules_path).read_text()
    parsed = parse_rules(text, file=rules_path)
    for d in parsed.diagnostics:
        click.echo(d.render(), err=True)
    ok = parsed.ok
    if ok and task_path:
        parsed_task = parse_task(Path(task_path).read_text(), parsed.value, file=task_path)
        for d in parsed_task.diagnostics:
            click.echo(d.render(), err=True)
        ok = parsed_task.ok
    if not ok:
        sys.exit(VALIDATION_EXIT)
    click.echo("ok")


_task_options = [
    click.option("--depth", type=int, default=None, help="Override the task depth."),
    click.option("--variant", type=click.Choice(["res", "exp", "semi-res"]), default=None),
    click.option("--fact", multiple=True, help="Additional ground fact (repeatable)."),
]


def task_options(fn):
    for opt in reversed(_task_options):
        fn = opt(fn)
    return fn


@cli.command(name="compile")
@click.argument("rules_path", type=click.Path(exists=True))
@click.argument("task_path", type=click.Path(exists=True))
@click.option("-o", "--output", type=click.Path(), default=None)
@click.option("--justification", is_flag=True, help="Include justification-graph rules.")
@task_options
@click.pass_context
def compile_cmd(ctx, rules_path, task_path, output, justification, depth, variant, fact):
    """Emit the derived solver-ready program."""
    rules = _load_rules(rules_path)
    task = _load_task(task_path, rules, _task_overrides(depth, variant, fact))
    program = _compile(task, justification)
    if output:
        Path(output).write_text(program.text)
    else:
        click.echo(program.text, nl=False)


@cli.command(name="solve")
@click.argument("rules_path", type=click.Path(exists=True))
@click.argument("task_path", type=click.Path(exists=True))
@task_options
@click.pass_context
def solve_cmd(ctx, rules_path, task_path, depth, variant, fact):
    """Solve a task and print the solution bundle as JSON."""
    rules = _load_rules(rules_path)
    task = _load_task(task_path, rules, _task_overrides(depth, variant, fact))
    program = _compile(task, False)
    result = _solve_or_die(ctx, program)
    click.echo(json.dumps(result_bundle(result, with_graph=False), indent=2))


@cli.command()
@click.argument("rules_path", type=click.Path(exists=True))
@click.argument("task_path", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["dot", "json"]), default="dot")
@task_options
@click.pass_context
def justify(ctx, rules_path, task_path, fmt, depth, variant, fact):
    """Solve with graph instrumentation and print the justification graph."""
    rules = _load_rules(rules_path)
    task = _load_task(task_path, rules, _task_overrides(depth, variant, fact))
    program = _compile(task, True)
    result = _solve_or_die(ctx, program)
    best = result.best_model()
    if best is None:
        _fail(SOLVER_EXIT, f"no model to justify (status {result.status})")
    graph = extract_graph(best)
    if fmt == "dot":
        click.echo(to_dot(graph), nl=False)
    else:
        click.echo(json.dumps(graph_payload(graph), indent=2))


@cli.command()
@click.argument("rules_path", type=click.Path(exists=True))
@click.argument("task_path", type=click.Path(exists=True))
@click.option("--candidate-cap", type=int, default=24, help="Abducible-space cap for the brute force.")
@click.option("--universe-cap", type=int, default=10000, help="Term-universe size cap.")
@task_options
@click.pass_context
def oracle(ctx, rules_path, task_path, candidate_cap, universe_cap, depth, variant, fact):
    """Compare the solver's optimal solutions against the brute-force oracle."""
    rules = _load_rules(rules_path)
    task = _load_task(task_path, rules, _task_overrides(depth, variant, fact))
    program = _compile(task, False)
    result = _solve_or_die(ctx, program)
    try:
        oracle_solutions = brute_force_abduce(task, universe_cap=universe_cap, candidate_cap=candidate_cap)
    except OracleError as exc:
        _fail(VALIDATION_EXIT, f"oracle refusal: {exc}")

    solver_solutions = [extract_solution(m) for m in result.optimal_models()]
    solver_cost = solver_solutions[0].cost if solver_solutions else None
    oracle_min = min((len(s) for s in oracle_solutions), default=None)
    checks = [check_general_solution(s.abduced, task) for s in solver_solutions]
    match = (
        (bool(oracle_solutions) == (result.status == "optimumFound"))
        and solver_cost == oracle_min
        and all(c.ok for c in checks)
    )
    report = {
        "summary": f"solver cost {solver_cost} == oracle minimum {oracle_min}"
        if match
        else f"MISMATCH: solver cost {solver_cost}, oracle minimum {oracle_min}",
        "match": match,
        "solver_status": result.status,
        "solver_cost": solver_cost,
        "oracle_minimum": oracle_min,
        "solver_solutions": sorted(s.rendered_abduced() for s in solver_solutions),
        "oracle_solutions": sorted(sorted(a.render() for a in s) for s in oracle_solutions),
        "solution_checks": [list(c.reasons) for c in checks],
    }
    click.echo(json.dumps(report, indent=2))
    if not match:
        sys.exit(MISMATCH_EXIT)


@cli.command()
@click.argument("rules_path", type=click.Path(exists=True))
@click.argument("task_path", type=click.Path(exists=True), required=False)
@click.option("--predicate", default=None, help="Root predicate (defaults to the task query).")
@click.option("--depth", type=int, default=None, help="Backward-chaining bound.")
@click.option("--format", "fmt", type=click.Choice(["json", "dot"]), default="json")
def analyze(rules_path, task_path, predicate, depth, fmt):
    """Emit the abstract proof graph, its minimization and the instance set."""
    rules = _load_rules(rules_path)
    if predicate is None or depth is None:
        if not task_path:
            _fail(USAGE_EXIT, "pass a task file or both --predicate and --depth")
        task = _load_task(task_path, rules, {})
        predicate = predicate or task.query.atom.predicate
        depth = depth if depth is not None else task.depth
    graph, instances = build_abstract(rules, predicate, depth)
    graph_min = minimize(graph)
    if fmt == "dot":
        lines = ["digraph abstract {"]
        for node in graph.nodes:
            lines.append(f'  "{node.render()}";')
        for child, parent in sorted(graph.edges, key=lambda e: (e[0].render(), e[1].render())):
            lines.append(f'  "{child.render()}" -> "{parent.render()}";')
        lines.append("}")
        click.echo("\n".join(lines))
        return
    payload = {
        "nodes": [n.render() for n in graph.nodes],
        "edges": sorted([c.render(), p.render()] for c, p in graph.edges),
        "minimal_nodes": [n.render() for n in graph_min.nodes],
        "minimal_edges": sorted([c.render(), p.render()] for c, p in graph_min.edges),
        "instances": sorted(e.render() for e in instances.entries),
    }
    click.echo(json.dumps(payload, indent=2))


@cli.command()
@click.argument("rules_path", type=click.Path(exists=True))
@click.argument("task_path", type=click.Path(exists=True))
@click.option("--max-iters", type=int, default=20)
@click.option("--pick", default=None, help="Atom to instantiate when several contain extVar.")
@task_options
@click.pass_context
def generalize(ctx, rules_path, task_path, max_iters, pick, depth, variant, fact):
    """Run the fresh-constant generalization loop (semi-res tasks only)."""
    rules = _load_rules(rules_path)
    task = _load_task(task_path, rules, _task_overrides(depth, variant, fact))
    try:
        result = generalize_task(task, _solver_config(ctx), max_iters=max_iters, pick=pick)
    except GeneralizeError as exc:
        _fail(SOLVER_EXIT if exc.kind == "solver" else VALIDATION_EXIT, str(exc))
    click.echo(json.dumps(generalized_payload(result), indent=2))


@cli.command()
@click.option("--port", type=int, default=7878)
@click.option("--host", default="127.0.0.1")
@click.option("--state-dir", type=click.Path(), default=None)
@click.option("--ui-dir", type=click.Path(), default=None)
@click.pass_context
def serve(ctx, port, host, state_dir, ui_dir):
    """Run the interactive session service."""
    import uvicorn

    from .service import build_app

    if ui_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(bundled) if bundled.is_dir() else None
    app = build_app(_solver_config(ctx), state_dir=state_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


def main() -> None:
    try:
        cli(standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        sys.exit(USAGE_EXIT)
    except click.ClickException as exc:
        exc.show()
        sys.exit(USAGE_EXIT)
    except click.exceptions.Abort:
        sys.exit(USAGE_EXIT)


if __name__ == "__main__":
    main()
