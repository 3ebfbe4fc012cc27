import sys
from pathlib import Path

import pytest

from abductor.encode import compile_task
from abductor.parse import parse_rules, parse_task
from abductor.solver import SolverConfig, solve

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

# The bundled engine keeps the suite independent of a locally installed
# clingo; point ABDUCTOR_SOLVER elsewhere to exercise a real binary.
ENGINE = f"{sys.executable} -m abductor.groundsolve"


@pytest.fixture(scope="session")
def solver_cfg() -> SolverConfig:
    return SolverConfig(executable=ENGINE, timeout_seconds=120.0)


def load_fixture(name: str):
    rules = parse_rules((DATA / f"{name}_rules.lp").read_text())
    assert rules.ok, [d.render() for d in rules.diagnostics]
    task = parse_task((DATA / f"{name}_task.json").read_text(), rules.value)
    assert task.ok, [d.render() for d in task.diagnostics]
    return task.value


def solve_fixture(name: str, cfg: SolverConfig, extra_facts=(), justify=False):
    from abductor.parse import parse_atom_text

    task = load_fixture(name)
    if extra_facts:
        task = task.with_facts([parse_atom_text(f) for f in extra_facts])
    result = solve(compile_task(task, include_justification=justify), cfg)
    assert result.status == "optimumFound", result.raw_output
    return result
