"""Iterative generalization of semi-res abductive solutions.

The loop re-solves after adding facts that pin fresh constants (v1, v2, ...)
into the extVar positions of the current optimal solution, until no extVar
remains; the fresh constants then read as symbolic variables.  When a step
has several optimal solutions they are all recorded, since the branch taken
decides how general the final answer is.
"""

from __future__ import annotations

from dataclasses import dataclass

from .encode import compile_task
from .extract import AbductiveSolution, extract_solution
from .model import (
    Atom,
    ExtVarTerm,
    FuncTerm,
    Placeholder,
    SkolemTerm,
    TaskSpec,
    Term,
)
from .solver import SolverConfig, solve

VAR_NAME_SEQUENCE = ("Y", "Z", "W", "U", "T", "S", "R", "Q", "P", "O")
DEFAULT_MAX_ITERS = 20


class GeneralizeError(Exception):
    def __init__(self, message: str, kind: str = "procedure"):
        super().__init__(message)
        self.kind = kind  # "variant" | "solver" | "cap" | "procedure"


def _contains_extvar(term: Term) -> bool:
    if isinstance(term, ExtVarTerm):
        return True
    if isinstance(term, (SkolemTerm, FuncTerm)):
        return any(_contains_extvar(a) for a in term.args)
    return False


def atom_has_extvar(atom: Atom) -> bool:
    return any(_contains_extvar(t) for t in atom.args)


def _replace_extvars(term: Term, counter: list[int]) -> Term:
    if isinstance(term, ExtVarTerm):
        counter[0] += 1
        return Placeholder(counter[0])
    if isinstance(term, SkolemTerm):
        return SkolemTerm(term.rule_id, term.var_name, tuple(_replace_extvars(a, counter) for a in term.args))
    if isinstance(term, FuncTerm):
        return FuncTerm(term.name, tuple(_replace_extvars(a, counter) for a in term.args))
    return term


@dataclass(frozen=True)
class GeneralizeStep:
    added_fact: str | None  # fact added to reach this solution; None at step 0
    solution: tuple[str, ...]
    all_optimal: tuple[tuple[str, ...], ...]
    picked: str | None  # atom chosen for instantiation after this step


@dataclass(frozen=True)
class GeneralizedSolution:
    abduced: tuple[str, ...]  # over fresh v-constants
    var_map: tuple[tuple[str, str], ...]  # fresh constant -> symbolic variable
    trace: tuple[GeneralizeStep, ...]
    exhausted: bool

    def symbolic(self) -> tuple[str, ...]:
        """The abduced set with fresh constants shown as variables."""
        out = []
        for text in self.abduced:
            for const, var in self.var_map:
                text = _replace_token(text, const, var)
            out.append(text)
        return tuple(sorted(out))


def _replace_token(text: str, token: str, replacement: str) -> str:
    import re

    return re.sub(rf"(?<![A-Za-z0-9_]){token}(?![A-Za-z0-9_])", replacement, text)


def generalize_task(
    task: TaskSpec,
    cfg: SolverConfig | None = None,
    max_iters: int = DEFAULT_MAX_ITERS,
    pick: str | None = None,
) -> GeneralizedSolution:
    if task.variant != "semi-res":
        raise GeneralizeError(
            f"generalization needs the semi-res encoding, task uses {task.variant!r}", kind="variant"
        )
    cfg = cfg or SolverConfig()

    used_indices = {t.index for t in task.constants() if isinstance(t, Placeholder)}
    counter = [max(used_indices, default=0)]

    current = task
    added: list[Atom] = []
    trace: list[GeneralizeStep] = []
    last_added: str | None = None
    final: AbductiveSolution | None = None
    exhausted = False

    for _ in range(max_iters + 1):
        result = solve(compile_task(current), cfg)
        if result.status not in ("optimumFound", "satisfiable"):
            raise GeneralizeError(f"solve failed with status {result.status}", kind="solver")
        optimal = result.optimal_models()
        solutions = [extract_solution(m) for m in optimal]
        chosen = solutions[0]
        extvar_atoms = sorted(a.render() for a in chosen.abduced if atom_has_extvar(a))
        picked = None
        if extvar_atoms:
            picked = pick if pick in extvar_atoms else extvar_atoms[0]
        trace.append(
            GeneralizeStep(
                added_fact=last_added,
                solution=tuple(chosen.rendered_abduced()),
                all_optimal=tuple(tuple(s.rendered_abduced()) for s in solutions),
                picked=picked,
            )
        )
        if not extvar_atoms:
            final = chosen
            exhausted = True
            break
        source = next(a for a in chosen.abduced if a.render() == picked)
        new_fact = Atom(source.predicate, tuple(_replace_extvars(t, counter) for t in source.args))
        added.append(new_fact)
        last_added = new_fact.render()
        current = current.with_facts([new_fact])

    if not exhausted:
        raise GeneralizeError(
            f"extVar still present after {max_iters} iterations", kind="cap"
        )

    assert final is not None
    abduced = sorted({a.render() for a in added} | set(final.rendered_abduced()))
    fresh = sorted(i for i in range(1, counter[0] + 1) if i not in used_indices)
    var_map = tuple(
        (f"v{idx}", VAR_NAME_SEQUENCE[pos] if pos < len(VAR_NAME_SEQUENCE) else f"G{pos}")
        for pos, idx in enumerate(fresh)
    )
    return GeneralizedSolution(
        abduced=tuple(abduced),
        var_map=var_map,
        trace=tuple(trace),
        exhausted=exhausted,
    )


def generalized_payload(result: GeneralizedSolution) -> dict:
    return {
        "abduced": list(result.abduced),
        "generalized": list(result.symbolic()),
        "var_map": {const: var for const, var in result.var_map},
        "exhausted": result.exhausted,
        "trace": [
            {
                "added_fact": step.added_fact,
                "solution": list(step.solution),
                "all_optimal": [list(s) for s in step.all_optimal],
                "picked": step.picked,
            }
            for step in result.trace
        ],
    }
