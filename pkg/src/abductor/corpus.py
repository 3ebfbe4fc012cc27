"""Deterministic generation of small simple tasks for property testing."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import (
    Atom,
    BlockPattern,
    Constant,
    Query,
    Rule,
    RuleSet,
    Literal,
    TaskSpec,
    Variable,
    classify_simple,
    validate_ruleset,
)
from .oracle import OracleError, build_universe, candidate_space, depth_map

CONSTANTS = ("alpha", "beta", "gamma")
PREDICATES = ("p", "q", "r", "s")
VAR_NAMES = ("X", "Y", "Z", "W")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    task: TaskSpec
    candidate_count: int


def _random_rule(rng: random.Random, rule_id: int, arities: dict[str, int], consts: list[str]) -> Rule | None:
    head_pred = rng.choice(sorted(arities))
    head_arity = arities[head_pred]
    head_vars = [VAR_NAMES[i] for i in range(head_arity)]
    head_args = tuple(
        Variable(v) if rng.random() < 0.8 else Constant(rng.choice(consts)) for v in head_vars
    )
    used_head_vars = [t.name for t in head_args if isinstance(t, Variable)]

    body: list[Literal] = []
    available = list(used_head_vars)
    for _ in range(rng.randint(1, 2)):
        pred = rng.choice(sorted(arities))
        args = []
        for _ in range(arities[pred]):
            roll = rng.random()
            if available and roll < 0.65:
                args.append(Variable(rng.choice(available)))
            elif roll < 0.8:
                fresh = next((v for v in VAR_NAMES if v not in available), None)
                if fresh is None:
                    args.append(Variable(rng.choice(available)) if available else Constant(rng.choice(consts)))
                else:
                    available.append(fresh)
                    args.append(Variable(fresh))
            else:
                args.append(Constant(rng.choice(consts)))
        body.append(Literal(Atom(pred, tuple(args))))

    body_vars = {v for lit in body for v in lit.atom.variables()}
    if set(used_head_vars) - body_vars:
        return None  # head variable not bound by the body; caller retries
    return Rule(id=rule_id, head=Atom(head_pred, head_args), body=tuple(body))


def _random_task(rng: random.Random) -> TaskSpec | None:
    consts = sorted(rng.sample(CONSTANTS, rng.randint(1, 3)))
    preds = sorted(rng.sample(PREDICATES, rng.randint(2, 4)))
    arities = {p: rng.randint(1, 2) for p in preds}

    n_rules = rng.randint(1, 3)
    rules = []
    for i in range(1, n_rules + 1):
        rule = None
        for _ in range(8):
            rule = _random_rule(rng, i, arities, consts)
            if rule is not None:
                break
        if rule is None:
            return None
        rules.append(rule)
    ruleset = RuleSet(tuple(rules))
    if validate_ruleset(ruleset):
        return None

    query_pred = rules[0].head.predicate
    query = Query(
        Atom(query_pred, tuple(Constant(rng.choice(consts)) for _ in range(arities[query_pred])))
    )

    blocked: list[str] = []
    if rng.random() < 0.8:
        blocked.append(query_pred)
    for p in preds:
        if p not in blocked and rng.random() < 0.2:
            blocked.append(p)
    blocklist = tuple(
        BlockPattern(Atom(p, tuple(Variable(VAR_NAMES[i]) for i in range(arities[p]))))
        for p in sorted(blocked)
    )

    facts = []
    for _ in range(rng.randint(0, 2)):
        p = rng.choice([x for x in preds if x not in blocked] or preds)
        if p in blocked:
            continue
        facts.append(Atom(p, tuple(Constant(rng.choice(consts)) for _ in range(arities[p]))))
    facts = list(dict.fromkeys(facts))

    return TaskSpec(
        rules=ruleset,
        query=query,
        user_facts=tuple(facts),
        blocklist=blocklist,
        depth=rng.randint(1, 3),
        variant="res",
    )


def generate_simple_tasks(
    count: int = 50,
    seed: int = 2024,
    candidate_cap: int = 24,
    universe_cap: int = 2000,
) -> list[CorpusEntry]:
    """First `count` generated tasks that are simple and within oracle caps."""
    rng = random.Random(seed)
    out: list[CorpusEntry] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > count * 400:
            raise RuntimeError("corpus generation failed to converge")
        task = _random_task(rng)
        if task is None:
            continue
        if not classify_simple(task).is_simple:
            continue
        try:
            universe = build_universe(task, cap=universe_cap)
            levels = depth_map(task.rules, task.query, universe, task.depth)
            candidates = candidate_space(task, universe, levels, cap=candidate_cap)
        except OracleError:
            continue
        out.append(CorpusEntry(name=f"task{len(out):03d}", task=task, candidate_count=len(candidates)))
    return out
