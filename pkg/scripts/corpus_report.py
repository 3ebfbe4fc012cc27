#!/usr/bin/env python3
"""Solver-versus-oracle agreement report over a generated task corpus.

Prints one line per task (status, optimal cost, oracle minimum, agreement)
and a summary; exits nonzero on any disagreement.
"""

from __future__ import annotations

import argparse
import sys
import time

from abductor.corpus import generate_simple_tasks
from abductor.encode import compile_task
from abductor.extract import extract_solution
from abductor.oracle import brute_force_abduce
from abductor.solver import SolverConfig, solve


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    cfg = SolverConfig()
    entries = generate_simple_tasks(count=args.count, seed=args.seed)
    mismatches = 0
    started = time.time()
    for entry in entries:
        result = solve(compile_task(entry.task), cfg)
        oracle = brute_force_abduce(entry.task)
        oracle_min = min((len(s) for s in oracle), default=None)
        cost = None
        if result.status == "optimumFound":
            cost = extract_solution(result.optimal_models()[0]).cost
        agree = (bool(oracle) == (result.status == "optimumFound")) and cost == oracle_min
        mismatches += not agree
        print(
            f"{entry.name}: solver={result.status}/{cost} oracle={oracle_min} "
            f"candidates={entry.candidate_count} {'ok' if agree else 'MISMATCH'}"
        )
    print(f"\n{len(entries)} tasks in {time.time() - started:.1f}s, {mismatches} mismatch(es)")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
