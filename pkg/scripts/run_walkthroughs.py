#!/usr/bin/env python3
"""Drive the bundled walkthrough tasks end to end and print their solutions.

Useful as a quick smoke check after changing the encoder or the solver
bridge: every case states the abduced set it is expected to produce.
"""

from __future__ import annotations

import sys
from pathlib import Path

from abductor.encode import compile_task
from abductor.extract import extract_solution
from abductor.parse import parse_atom_text, parse_rules, parse_task
from abductor.solver import SolverConfig, solve

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"

CASES = [
    ("basic", (), {"q(john,james)", "s(james)"}),
    ("naf_pair", (), {"relD(v2)", "relB(v1,v2)", "relF(v2)"}),
    ("naf_pair", ("relB(john,james)",), {"relD(james)", "relF(james)"}),
    ("naf_pair", ("relF(mary)",), {"relD(mary)", "relB(v1,mary)"}),
    ("chain", (), {"relC(john,extVar)", "relE(john,extVar,extVar)", "relD(john,extVar,extVar)"}),
    ("chain", ("relD(john,james,mary)",), {"relC(john,james)", "relE(john,james,mary)"}),
    ("mutual", ("relC(john)", "relA(mary)"), {"relD(mary)"}),
]


def main() -> int:
    cfg = SolverConfig()
    failures = 0
    for name, extra, expected in CASES:
        rules = parse_rules((DATA / f"{name}_rules.lp").read_text()).value
        task = parse_task((DATA / f"{name}_task.json").read_text(), rules).value
        if extra:
            task = task.with_facts([parse_atom_text(f) for f in extra])
        result = solve(compile_task(task), cfg)
        label = f"{name} +{','.join(extra)}" if extra else name
        if result.status != "optimumFound":
            print(f"FAIL {label}: status {result.status}")
            failures += 1
            continue
        got = set(extract_solution(result.optimal_models()[0]).rendered_abduced())
        verdict = "ok  " if got == expected else "FAIL"
        failures += got != expected
        print(f"{verdict} {label}: {sorted(got)}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
