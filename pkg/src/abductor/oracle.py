"""Brute-force reference implementations for verifying solver results.

Everything here works directly on the task semantics (term universes,
depth levels, least models, exhaustive subset search) and never looks at
the derived encodings, so it can serve as an independent check of the
whole compile-and-solve pipeline at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import (
    EXT_VAR,
    Atom,
    Constant,
    ExtVarTerm,
    IntTerm,
    Placeholder,
    Query,
    RuleSet,
    SkolemTerm,
    TaskSpec,
    Term,
    Variable,
    classify_simple,
    match_atom,
    skolem_depth,
    substitute_atom,
)

DEFAULT_UNIVERSE_CAP = 10_000
DEFAULT_CANDIDATE_CAP = 24


class OracleError(Exception):
    pass


@dataclass(frozen=True)
class SkolemFunction:
    rule_id: int
    var_name: str
    arity: int


@dataclass(frozen=True)
class TermUniverse:
    constants: frozenset[Term]
    max_skolem_depth: int
    terms: frozenset[Term]
    functions: tuple[SkolemFunction, ...]


def _base_constants(task: TaskSpec) -> set[Term]:
    consts = {t for t in task.constants() if not isinstance(t, IntTerm)}
    if not consts:
        # A task over variables only still needs one witness term.
        consts = {Constant("c0")}
    return consts


def skolem_functions(rules: RuleSet) -> tuple[SkolemFunction, ...]:
    out = []
    for rule in rules.rules:
        head_count = len(set(rule.head_vars()))
        for v in rule.existential_vars():
            out.append(SkolemFunction(rule.id, v, head_count))
    return tuple(out)


def build_universe(task: TaskSpec, cap: int = DEFAULT_UNIVERSE_CAP) -> TermUniverse:
    """Ground terms of skolem depth at most N over the task's constants.

    Under semi-res the universe is the constants plus the shared extVar
    constant; under exp there are no skolem functions to apply.
    """
    constants = _base_constants(task)
    if task.variant == "semi-res":
        terms = constants | {EXT_VAR}
        return TermUniverse(frozenset(constants), 0, frozenset(terms), ())

    functions = skolem_functions(task.rules) if task.variant == "res" else ()
    terms: set[Term] = set(constants)
    for _ in range(task.depth):
        new: set[Term] = set()
        for fn in functions:
            for combo in itertools.product(sorted(terms, key=lambda t: t.render()), repeat=fn.arity):
                candidate = SkolemTerm(fn.rule_id, fn.var_name, tuple(combo))
                if candidate not in terms:
                    new.add(candidate)
            if len(terms) + len(new) > cap:
                raise OracleError(
                    f"term universe exceeds cap {cap} (at least {len(terms) + len(new)} terms)"
                )
        if not new:
            break
        terms |= new
    return TermUniverse(frozenset(constants), task.depth, frozenset(terms), functions)


# ---------------------------------------------------------------------------
# Depth levels

MAX_DEPTH_ATOMS = 200_000


def _instantiations(atom: Atom, universe: TermUniverse) -> list[Atom]:
    names = []
    for v in atom.variables():
        if v not in names:
            names.append(v)
    if not names:
        return [atom]
    out = []
    ordered = sorted(universe.terms, key=lambda t: t.render())
    for combo in itertools.product(ordered, repeat=len(names)):
        out.append(substitute_atom(atom, dict(zip(names, combo))))
    return out


def depth_map(
    rules: RuleSet, query: Query, universe: TermUniverse, max_depth: int
) -> dict[Atom, int]:
    """Exact minimum depth level for every atom reachable within max_depth.

    Atoms absent from the result have no depth (conventionally -1): they can
    never sit in a backward-chaining tree of the query within the bound.
    """
    levels: dict[Atom, int] = {}
    base = query.atom
    frontier: list[Atom] = []
    for inst in _instantiations(base, universe):
        if inst not in levels:
            levels[inst] = 0
            frontier.append(inst)
    ordered_terms = sorted(universe.terms, key=lambda t: t.render())
    for level in range(max_depth):
        nxt: list[Atom] = []
        for target in frontier:
            for rule in rules.rules:
                binding = match_atom(rule.head, target)
                if binding is None:
                    continue
                free = [v for v in rule.var_order if v not in binding]
                for combo in itertools.product(ordered_terms, repeat=len(free)):
                    full = dict(binding)
                    full.update(zip(free, combo))
                    for lit in rule.body:
                        atom = substitute_atom(lit.atom, full)
                        if atom not in levels:
                            if len(levels) >= MAX_DEPTH_ATOMS:
                                raise OracleError("depth map exceeds atom budget")
                            levels[atom] = level + 1
                            nxt.append(atom)
        frontier = nxt
        if not frontier:
            break
    return levels


def depth_of(levels: dict[Atom, int], atom: Atom) -> int:
    return levels.get(atom, -1)


# ---------------------------------------------------------------------------
# Least models (negation-free programs)


def least_model(facts: set[Atom] | frozenset[Atom], rules: RuleSet) -> frozenset[Atom]:
    """Least fixpoint of the immediate-consequence step; rules must be naf-free."""
    for rule in rules.rules:
        if any(l.negated for l in rule.body):
            raise OracleError(f"rule {rule.id} uses negation as failure")
    atoms: set[Atom] = set(facts)
    by_pred: dict[str, list[Atom]] = {}
    for a in atoms:
        by_pred.setdefault(a.predicate, []).append(a)

    changed = True
    while changed:
        changed = False
        for rule in rules.rules:
            new_heads = _derive(rule, by_pred)
            for head in new_heads:
                if head not in atoms:
                    atoms.add(head)
                    by_pred.setdefault(head.predicate, []).append(head)
                    changed = True
    return frozenset(atoms)


def _derive(rule, by_pred) -> list[Atom]:
    heads: list[Atom] = []
    lits = [l.atom for l in rule.body]

    def rec(i: int, binding: dict[str, Term]) -> None:
        if i == len(lits):
            heads.append(substitute_atom(rule.head, binding))
            return
        for candidate in by_pred.get(lits[i].predicate, ()):
            trial = match_atom(lits[i], candidate, binding)
            if trial is not None:
                rec(i + 1, trial)

    rec(0, {})
    return heads


# ---------------------------------------------------------------------------
# General-solution checking (the task-level acceptance of a fact set)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    reasons: tuple[str, ...] = ()
    solver_assisted: bool = False


def _is_simple_enough(task: TaskSpec) -> bool:
    naf_free = all(not l.negated for r in task.rules.rules for l in r.body)
    return naf_free and not task.constraints


def _entailed_directly(fact_set: frozenset[Atom], task: TaskSpec) -> bool:
    model = least_model(set(fact_set) | set(task.user_facts), task.rules)
    if task.query.negated:
        return task.query.atom not in model
    if task.query.atom.is_ground():
        return task.query.atom in model
    return any(match_atom(task.query.atom, a) is not None for a in model)


def _entailed_by_solver(fact_set: frozenset[Atom], task: TaskSpec) -> bool:
    from .solver import SolverConfig, solve_text

    lines = [f"{a.render()}." for a in sorted(fact_set | set(task.user_facts), key=lambda x: x.render())]
    lines += [r.render() for r in task.rules.rules]
    lines += [c.render() for c in task.constraints]
    if task.query.negated:
        lines.append(f":- {task.query.atom.render()}.")
    elif task.query.atom.is_ground():
        lines.append(f":- not {task.query.atom.render()}.")
    else:
        lines.append(f"oracle_goal :- {task.query.atom.render()}.")
        lines.append(":- not oracle_goal.")
    result = solve_text("\n".join(lines) + "\n", SolverConfig(enumerate_all_optimal=False))
    if result.status not in ("satisfiable", "optimumFound", "unsatisfiable"):
        raise OracleError(f"entailment solver call failed: {result.status}")
    return result.status != "unsatisfiable"


def check_general_solution(
    fact_set: frozenset[Atom] | set[Atom],
    task: TaskSpec,
    universe: TermUniverse | None = None,
    levels: dict[Atom, int] | None = None,
) -> CheckResult:
    """Decide the three general-solution conditions for a candidate fact set."""
    fact_set = frozenset(fact_set)
    reasons: list[str] = []
    solver_assisted = not _is_simple_enough(task)

    if solver_assisted:
        entailed = _entailed_by_solver(fact_set, task)
    else:
        entailed = _entailed_directly(fact_set, task)
    if not entailed:
        reasons.append("condition 1: the query is not entailed")

    for atom in sorted(fact_set, key=lambda a: a.render()):
        for pattern in task.blocklist:
            if pattern.matches(atom):
                reasons.append(f"condition 2: {atom.render()} is blocked by {pattern.render()}")

    if universe is None:
        universe = build_universe(task)
    if levels is None:
        levels = depth_map(task.rules, task.query, universe, task.depth)
    for atom in sorted(fact_set, key=lambda a: a.render()):
        level = depth_of(levels, atom)
        if level < 0 or level > task.depth:
            reasons.append(f"condition 3: {atom.render()} has depth level {level}")

    return CheckResult(ok=not reasons, reasons=tuple(reasons), solver_assisted=solver_assisted)


# ---------------------------------------------------------------------------
# Exhaustive minimal abduction


def candidate_space(
    task: TaskSpec,
    universe: TermUniverse | None = None,
    levels: dict[Atom, int] | None = None,
    cap: int = DEFAULT_CANDIDATE_CAP,
) -> list[Atom]:
    """Ground atoms with a valid depth level that are not blocked."""
    if universe is None:
        universe = build_universe(task)
    if levels is None:
        levels = depth_map(task.rules, task.query, universe, task.depth)
    out = [
        atom
        for atom, level in levels.items()
        if 0 <= level <= task.depth and not any(p.matches(atom) for p in task.blocklist)
    ]
    out.sort(key=lambda a: a.render())
    if len(out) > cap:
        raise OracleError(f"candidate space has {len(out)} atoms, cap is {cap}")
    return out


def brute_force_abduce(
    task: TaskSpec,
    universe_cap: int = DEFAULT_UNIVERSE_CAP,
    candidate_cap: int = DEFAULT_CANDIDATE_CAP,
) -> frozenset[frozenset[Atom]]:
    """All cardinality-minimal general solutions of a simple task."""
    report = classify_simple(task)
    if not report.is_simple:
        raise OracleError(
            "brute force requires a simple task; violations: "
            + "; ".join(msg for _, msg in report.violations)
        )
    universe = build_universe(task, cap=universe_cap)
    levels = depth_map(task.rules, task.query, universe, task.depth)
    candidates = candidate_space(task, universe, levels, cap=candidate_cap)

    def ok(subset: tuple[Atom, ...]) -> bool:
        return check_general_solution(frozenset(subset), task, universe, levels).ok

    # Entailment is monotone for simple tasks, so the full candidate set
    # decides whether any solution exists at all.
    if not ok(tuple(candidates)):
        return frozenset()
    for size in range(len(candidates) + 1):
        winners = [frozenset(c) for c in itertools.combinations(candidates, size) if ok(c)]
        if winners:
            return frozenset(winners)
    return frozenset()
