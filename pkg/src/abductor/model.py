"""Syntactic core of the restricted rule language and abduction task types.

Everything here is an immutable value: terms, atoms, rules and task
specifications are frozen dataclasses that hash and compare structurally,
so they can live in sets and be shared freely between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Literal as TypingLiteral, Union

Variant = TypingLiteral["res", "exp", "semi-res"]
VARIANTS: tuple[str, ...] = ("res", "exp", "semi-res")

# Predicate names owned by the derived encodings; source programs must not
# use them or the emitted program would be ambiguous.
RESERVED_PREDICATES = frozenset(
    {
        "holds",
        "query",
        "explains",
        "createSub",
        "abducedFact",
        "user_input",
        "generate_proof",
        "goal",
        "max_ab_lvl",
        "max_graph_lvl",
        "causedBy",
        "justify",
        "directedEdge",
        "gen_graph",
        "userFact",
    }
)

_SKOLEM_RE = re.compile(r"^skolemFn_r(\d+)_(\w+)$")
_PLACEHOLDER_RE = re.compile(r"^v(\d+)$")


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Variable:
    name: str

    def render(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    symbol: str

    def render(self) -> str:
        return self.symbol


@dataclass(frozen=True)
class IntTerm:
    """Integer term; only appears in solver-side atoms (level arguments)."""

    value: int

    def render(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class ExtVarTerm:
    """The single distinguished placeholder constant of the semi-res encoding."""

    def render(self) -> str:
        return "extVar"


EXT_VAR = ExtVarTerm()


@dataclass(frozen=True)
class Placeholder:
    """Fresh constant v1, v2, ... standing for an un-ground goal variable."""

    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError("placeholder index must be positive")

    def render(self) -> str:
        return f"v{self.index}"


@dataclass(frozen=True)
class SkolemTerm:
    """Generated stand-in for an existential rule variable.

    Rendered ``skolemFn_r<ruleId>_<var>(<args>)``; the argument list is the
    rule's head variables in their fixed order.  A rule whose head has no
    variables yields a 0-ary skolem constant (rendered without parentheses).
    """

    rule_id: int
    var_name: str
    args: tuple["Term", ...]

    def render(self) -> str:
        name = f"skolemFn_r{self.rule_id}_{self.var_name}"
        if not self.args:
            return name
        return f"{name}({','.join(a.render() for a in self.args)})"


@dataclass(frozen=True)
class FuncTerm:
    """Generic function term for solver-side meta atoms.

    Instance tuples (``subInst_r1(...)``) and atoms nested inside meta
    predicates (``query(relA(X),0)``) parse into this; the source rule
    language itself stays function-free.
    """

    name: str
    args: tuple["Term", ...]

    def render(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(a.render() for a in self.args)})"


Term = Union[Variable, Constant, IntTerm, ExtVarTerm, Placeholder, SkolemTerm, FuncTerm]


def is_ground(term: Term) -> bool:
    if isinstance(term, Variable):
        return False
    if isinstance(term, (SkolemTerm, FuncTerm)):
        return all(is_ground(a) for a in term.args)
    return True


def skolem_depth(term: Term) -> int:
    """Nesting depth of skolem applications inside a term."""
    if isinstance(term, SkolemTerm):
        return 1 + max((skolem_depth(a) for a in term.args), default=0)
    if isinstance(term, FuncTerm):
        return max((skolem_depth(a) for a in term.args), default=0)
    return 0


def substitute_term(term: Term, binding: dict[str, Term]) -> Term:
    if isinstance(term, Variable):
        return binding.get(term.name, term)
    if isinstance(term, SkolemTerm):
        return SkolemTerm(term.rule_id, term.var_name, tuple(substitute_term(a, binding) for a in term.args))
    if isinstance(term, FuncTerm):
        return FuncTerm(term.name, tuple(substitute_term(a, binding) for a in term.args))
    return term


def match_term(pattern: Term, value: Term, binding: dict[str, Term]) -> bool:
    """One-way matching; extends binding in place, False on clash."""
    if isinstance(pattern, Variable):
        bound = binding.get(pattern.name)
        if bound is None:
            binding[pattern.name] = value
            return True
        return bound == value
    if isinstance(pattern, SkolemTerm):
        return (
            isinstance(value, SkolemTerm)
            and value.rule_id == pattern.rule_id
            and value.var_name == pattern.var_name
            and len(value.args) == len(pattern.args)
            and all(match_term(p, v, binding) for p, v in zip(pattern.args, value.args))
        )
    if isinstance(pattern, FuncTerm):
        return (
            isinstance(value, FuncTerm)
            and value.name == pattern.name
            and len(value.args) == len(pattern.args)
            and all(match_term(p, v, binding) for p, v in zip(pattern.args, value.args))
        )
    return pattern == value


# ---------------------------------------------------------------------------
# Atoms, literals, rules


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    def render(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(a.render() for a in self.args)})"

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(is_ground(a) for a in self.args)

    def variables(self) -> list[str]:
        """Variable names in left-to-right first-occurrence order."""
        out: list[str] = []
        for arg in self.args:
            _collect_vars(arg, out)
        return out


def _collect_vars(term: Term, out: list[str]) -> None:
    if isinstance(term, Variable):
        if term.name not in out:
            out.append(term.name)
    elif isinstance(term, (SkolemTerm, FuncTerm)):
        for a in term.args:
            _collect_vars(a, out)


def substitute_atom(atom: Atom, binding: dict[str, Term]) -> Atom:
    return Atom(atom.predicate, tuple(substitute_term(a, binding) for a in atom.args))


def match_atom(pattern: Atom, value: Atom, binding: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """Match a possibly non-ground atom against a ground one."""
    if pattern.predicate != value.predicate or pattern.arity != value.arity:
        return None
    trial = dict(binding) if binding else {}
    for p, v in zip(pattern.args, value.args):
        if not match_term(p, v, trial):
            return None
    return trial


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def render(self) -> str:
        return f"not {self.atom.render()}" if self.negated else self.atom.render()


@dataclass(frozen=True)
class Rule:
    """One source rule ``head :- body.`` with its fixed variable order.

    ``var_order`` lists every variable of the rule exactly once, in
    first-occurrence order scanning the head and then the body.
    """

    id: int
    head: Atom
    body: tuple[Literal, ...]
    var_order: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.var_order:
            object.__setattr__(self, "var_order", tuple(compute_var_order(self.head, self.body)))

    def render(self) -> str:
        return f"{self.head.render()} :- {', '.join(l.render() for l in self.body)}."

    def head_vars(self) -> list[str]:
        return self.head.variables()

    def existential_vars(self) -> list[str]:
        """Variables occurring in the body but not the head, in var_order."""
        head = set(self.head_vars())
        return [v for v in self.var_order if v not in head]


def compute_var_order(head: Atom, body: Iterable[Literal]) -> list[str]:
    order = head.variables()
    for lit in body:
        for v in lit.atom.variables():
            if v not in order:
                order.append(v)
    return order


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]

    def render(self) -> str:
        return "\n".join(r.render() for r in self.rules) + ("\n" if self.rules else "")

    def by_id(self, rule_id: int) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def predicates(self) -> dict[str, int]:
        """Predicate -> arity map over heads and bodies."""
        out: dict[str, int] = {}
        for r in self.rules:
            out.setdefault(r.head.predicate, r.head.arity)
            for lit in r.body:
                out.setdefault(lit.atom.predicate, lit.atom.arity)
        return out


# ---------------------------------------------------------------------------
# Task-level types


@dataclass(frozen=True)
class Query:
    """Goal of the abduction process: a positive atom or a ground NAF atom."""

    atom: Atom
    negated: bool = False

    def render(self) -> str:
        return f"not {self.atom.render()}" if self.negated else self.atom.render()


@dataclass(frozen=True)
class BlockPattern:
    """One abducible-blocking constraint ``:- abducedFact(<pattern>).``"""

    atom: Atom

    def render(self) -> str:
        return self.atom.render()

    def matches(self, ground: Atom) -> bool:
        if ground.predicate != self.atom.predicate or ground.arity != self.atom.arity:
            return False
        binding: dict[str, Term] = {}
        for pat, val in zip(self.atom.args, ground.args):
            if isinstance(pat, Variable):
                if pat.name in binding and binding[pat.name] != val:
                    return False
                binding[pat.name] = val
            elif pat != val:
                return False
        return True


@dataclass(frozen=True)
class ModelConstraint:
    """Headless constraint over the resulting model (the set C)."""

    body: tuple[Literal, ...]

    def render(self) -> str:
        return f":- {', '.join(l.render() for l in self.body)}."


@dataclass(frozen=True)
class TaskSpec:
    rules: RuleSet
    query: Query
    user_facts: tuple[Atom, ...] = ()
    blocklist: tuple[BlockPattern, ...] = ()
    constraints: tuple[ModelConstraint, ...] = ()
    depth: int = 0
    variant: str = "res"
    graph_depth: int | None = None

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.graph_depth is None:
            object.__setattr__(self, "graph_depth", self.depth + 1)
        elif self.graph_depth < 1:
            raise ValueError("graph_depth must be positive")

    @property
    def max_ab_lvl(self) -> int:
        return self.depth + 1

    def with_facts(self, extra: Iterable[Atom]) -> "TaskSpec":
        """Copy of the task with additional user facts appended in order."""
        merged = list(self.user_facts)
        for a in extra:
            if a not in merged:
                merged.append(a)
        return TaskSpec(
            rules=self.rules,
            query=self.query,
            user_facts=tuple(merged),
            blocklist=self.blocklist,
            constraints=self.constraints,
            depth=self.depth,
            variant=self.variant,
            graph_depth=self.graph_depth,
        )

    def constants(self) -> set[Term]:
        """Ground leaf terms occurring in the rules, query and user facts."""
        found: set[Term] = set()

        def walk(term: Term) -> None:
            if isinstance(term, (Constant, Placeholder, ExtVarTerm, IntTerm)):
                found.add(term)
            elif isinstance(term, (SkolemTerm, FuncTerm)):
                for a in term.args:
                    walk(a)

        for rule in self.rules.rules:
            for a in rule.head.args:
                walk(a)
            for lit in rule.body:
                for a in lit.atom.args:
                    walk(a)
        for fact in self.user_facts:
            for a in fact.args:
                walk(a)
        for a in self.query.atom.args:
            walk(a)
        return found


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    rule_id: int | None
    assumption: int | None
    message: str

    def render(self) -> str:
        where = f"rule {self.rule_id}: " if self.rule_id is not None else ""
        tag = f"[assumption {self.assumption}] " if self.assumption is not None else ""
        return f"{where}{tag}{self.message}"


def validate_ruleset(rules: RuleSet) -> list[Violation]:
    """Check the input-rule assumptions; an empty list means all hold."""
    violations: list[Violation] = []
    seen_ids: set[int] = set()
    arities: dict[str, int] = {}

    for rule in rules.rules:
        if rule.id in seen_ids:
            violations.append(Violation(rule.id, 6, "duplicate rule id"))
        seen_ids.add(rule.id)

        if not rule.body:
            violations.append(Violation(rule.id, None, "rule must have a nonempty body"))

        head_vars = set(rule.head_vars())
        pos_vars: set[str] = set()
        body_vars: set[str] = set()
        for lit in rule.body:
            vs = set(lit.atom.variables())
            body_vars |= vs
            if not lit.negated:
                pos_vars |= vs

        missing = head_vars - body_vars
        if missing:
            violations.append(
                Violation(
                    rule.id,
                    3,
                    f"head variable(s) {', '.join(sorted(missing))} do not occur in the body",
                )
            )
        for lit in rule.body:
            if lit.negated:
                unsafe = set(lit.atom.variables()) - pos_vars
                if unsafe:
                    violations.append(
                        Violation(
                            rule.id,
                            5,
                            f"variable(s) {', '.join(sorted(unsafe))} occur only under 'not'",
                        )
                    )

        order = rule.var_order
        all_vars = head_vars | body_vars
        if len(order) != len(set(order)) or set(order) != all_vars:
            violations.append(
                Violation(rule.id, None, "var_order is not a permutation of the rule's variables")
            )

        for v in all_vars:
            if v.startswith("V_"):
                violations.append(
                    Violation(rule.id, None, f"variable {v} collides with the generated V_ namespace")
                )

        for atom in [rule.head] + [l.atom for l in rule.body]:
            if atom.predicate in RESERVED_PREDICATES:
                violations.append(
                    Violation(rule.id, None, f"predicate {atom.predicate} is reserved by the encoding")
                )
            prev = arities.get(atom.predicate)
            if prev is None:
                arities[atom.predicate] = atom.arity
            elif prev != atom.arity:
                violations.append(
                    Violation(
                        rule.id,
                        None,
                        f"predicate {atom.predicate} used with arity {atom.arity} and {prev}",
                    )
                )
            for t in atom.args:
                if isinstance(t, (SkolemTerm, FuncTerm, IntTerm)):
                    violations.append(
                        Violation(rule.id, 2, f"function or arithmetic term {t.render()} not allowed")
                    )
    return violations


def validate_task(task: TaskSpec) -> list[Violation]:
    """Structural checks beyond the rule assumptions."""
    violations: list[Violation] = []
    arities = task.rules.predicates()

    def check_arity(atom: Atom, where: str) -> None:
        prev = arities.get(atom.predicate)
        if prev is None:
            arities[atom.predicate] = atom.arity
        elif prev != atom.arity:
            violations.append(
                Violation(None, None, f"{where}: predicate {atom.predicate} has arity {prev}, got {atom.arity}")
            )

    if task.query.negated and not task.query.atom.is_ground():
        violations.append(Violation(None, None, "a negation-as-failure query must be ground"))
    check_arity(task.query.atom, "query")

    for fact in task.user_facts:
        if not fact.is_ground():
            violations.append(Violation(None, None, f"user fact {fact.render()} is not ground"))
        check_arity(fact, "fact")

    for pat in task.blocklist:
        check_arity(pat.atom, "block pattern")
        for t in pat.atom.args:
            if not isinstance(t, (Variable, Constant, Placeholder)):
                violations.append(
                    Violation(None, None, f"block pattern {pat.render()} may only use variables and constants")
                )

    for con in task.constraints:
        pos_vars: set[str] = set()
        for lit in con.body:
            if not lit.negated:
                pos_vars |= set(lit.atom.variables())
            check_arity(lit.atom, "constraint")
        for lit in con.body:
            if lit.negated:
                unsafe = set(lit.atom.variables()) - pos_vars
                if unsafe:
                    violations.append(
                        Violation(
                            None,
                            None,
                            f"constraint {con.render()}: variable(s) {', '.join(sorted(unsafe))} occur only under 'not'",
                        )
                    )

    if task.variant == "exp":
        offenders = [r.id for r in task.rules.rules if r.existential_vars()]
        if offenders:
            violations.append(
                Violation(
                    None,
                    None,
                    "variant 'exp' requires rules without existential variables "
                    f"(violated by rule(s) {', '.join(map(str, offenders))})",
                )
            )
    return violations


# ---------------------------------------------------------------------------
# Simple-task classification


@dataclass(frozen=True)
class SimpleTaskReport:
    is_simple: bool
    violations: tuple[tuple[int, str], ...] = ()


def classify_simple(task: TaskSpec) -> SimpleTaskReport:
    """Decide membership in the restricted task class the formal results cover.

    The seven conditions: naf-free rules, function-free rules, no repeated
    head variables, empty model constraints, fully un-ground single-atom
    block patterns with distinct variables, no user fact on a fully blocked
    predicate, and a ground positive query.
    """
    found: list[tuple[int, str]] = []

    for rule in task.rules.rules:
        if any(l.negated for l in rule.body):
            found.append((1, f"rule {rule.id} uses negation as failure"))
    for rule in task.rules.rules:
        bad = [
            t.render()
            for atom in [rule.head] + [l.atom for l in rule.body]
            for t in atom.args
            if isinstance(t, (SkolemTerm, FuncTerm, IntTerm))
        ]
        if bad:
            found.append((2, f"rule {rule.id} contains function or arithmetic terms: {', '.join(bad)}"))
    for rule in task.rules.rules:
        names = [t.name for t in rule.head.args if isinstance(t, Variable)]
        if len(names) != len(set(names)):
            found.append((3, f"rule {rule.id} repeats a variable in its head"))
    if task.constraints:
        found.append((4, "the set of model constraints is not empty"))

    fully_blocked: set[str] = set()
    for pat in task.blocklist:
        args = pat.atom.args
        if not all(isinstance(t, Variable) for t in args):
            found.append((5, f"block pattern {pat.render()} contains ground arguments"))
            continue
        names = [t.name for t in args]  # type: ignore[union-attr]
        if len(names) != len(set(names)):
            found.append((5, f"block pattern {pat.render()} repeats a variable"))
            continue
        fully_blocked.add(pat.atom.predicate)

    for fact in task.user_facts:
        if fact.predicate in fully_blocked:
            found.append((6, f"user fact {fact.render()} uses the fully blocked predicate {fact.predicate}"))

    if task.query.negated:
        found.append((7, "query is a negation-as-failure atom"))
    elif not task.query.atom.is_ground():
        found.append((7, "query is not fully ground"))

    found.sort(key=lambda v: (v[0], v[1]))
    return SimpleTaskReport(is_simple=not found, violations=tuple(found))
