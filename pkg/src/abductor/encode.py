"""Derivation of the solver-ready program for an abduction task.

The emitted text is byte-deterministic for a given task: section order,
statement order inside each section, and formatting are all fixed.  Output
is plain ASP accepted by any Clingo-compatible solver.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .model import (
    EXT_VAR,
    Atom,
    Constant,
    Literal,
    Placeholder,
    Query,
    Rule,
    RuleSet,
    SkolemTerm,
    TaskSpec,
    Term,
    Variable,
    ModelConstraint,
)


class EncodingError(Exception):
    pass


@dataclass(frozen=True)
class SkolemAssignment:
    """Map from a rule's existential variables to their generated terms."""

    rule_id: int
    mapping: tuple[tuple[str, Term], ...]

    def as_dict(self) -> dict[str, Term]:
        return dict(self.mapping)


@dataclass(frozen=True)
class DerivedProgram:
    text: str
    variant: str
    max_ab_lvl: int
    rule_table: tuple[tuple[int, Rule], ...]
    has_justification: bool
    graph_depth: int

    def rule_by_id(self, rule_id: int) -> Rule:
        return dict(self.rule_table)[rule_id]

    def digest(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Helpers


def _wrap_holds(atom: Atom) -> str:
    return f"holds({atom.render()})"


def _wrap_literal(lit: Literal) -> str:
    text = _wrap_holds(lit.atom)
    return f"not {text}" if lit.negated else text


def _rule_stmt(head: str, body: list[str]) -> str:
    return f"{head} :- {', '.join(body)}."


def _constraint_stmt(body: list[str]) -> str:
    return f":- {', '.join(body)}."


def _inst_term(rule: Rule, args: list[str]) -> str:
    name = f"subInst_r{rule.id}"
    return f"{name}({','.join(args)})" if args else name


def skolemize(rule: Rule, variant: str) -> SkolemAssignment:
    """Assign each existential variable its generated stand-in term.

    Under ``res`` the stand-in is a skolem term over the head variables in
    the rule's fixed order; under ``semi-res`` every existential variable
    maps to the shared extVar constant; ``exp`` requires that there are no
    existential variables at all.
    """
    existentials = rule.existential_vars()
    if variant == "exp" and existentials:
        raise EncodingError(
            f"rule {rule.id} has existential variable(s) {', '.join(existentials)}; "
            "variant 'exp' requires rules without existential variables"
        )
    head_vars = set(rule.head_vars())
    skolem_args = tuple(Variable(v) for v in rule.var_order if v in head_vars)
    mapping: list[tuple[str, Term]] = []
    for v in existentials:
        if variant == "semi-res":
            mapping.append((v, EXT_VAR))
        else:
            mapping.append((v, SkolemTerm(rule.id, v, skolem_args)))
    return SkolemAssignment(rule.id, tuple(mapping))


# ---------------------------------------------------------------------------
# Section emitters


def emit_forward(rules: RuleSet, constraints: tuple[ModelConstraint, ...] = ()) -> list[str]:
    """Wrap each source rule and model constraint in the holds predicate."""
    out: list[str] = []
    for rule in rules.rules:
        out.append(_rule_stmt(_wrap_holds(rule.head), [_wrap_literal(l) for l in rule.body]))
    for con in constraints:
        out.append(_constraint_stmt([_wrap_literal(l) for l in con.body]))
    return out


def emit_ag1(rule: Rule, skolems: SkolemAssignment) -> list[str]:
    """Rule instantiation from queries plus one explains rule per body literal."""
    assignment = skolems.as_dict()
    inst_args = [assignment[v].render() if v in assignment else v for v in rule.var_order]
    plain_args = list(rule.var_order)
    out = [
        _rule_stmt(
            f"createSub({_inst_term(rule, inst_args)},N+1)",
            [f"query({rule.head.render()},N)", "max_ab_lvl(M)", "N<M-1"],
        )
    ]
    for lit in rule.body:
        out.append(
            _rule_stmt(
                f"explains({lit.atom.render()},{rule.head.render()},N)",
                [f"createSub({_inst_term(rule, plain_args)},N)"],
            )
        )
    return out


def _masked_args(rule: Rule, atom: Atom) -> list[str]:
    """Variable list keeping original names only at positions used by atom."""
    used = set(atom.variables())
    return [v if v in used else f"V_{v}" for v in rule.var_order]


def _fresh_args(rule: Rule) -> list[str]:
    return [f"V_{v}" for v in rule.var_order]


def emit_ag2_res(rule: Rule) -> list[str]:
    """Depth-capped rebinding of rule instantiations from established atoms."""
    fresh = _fresh_args(rule)
    out: list[str] = []
    for lit in rule.body:
        out.append(
            _rule_stmt(
                f"createSub({_inst_term(rule, _masked_args(rule, lit.atom))},M-1)",
                [
                    f"createSub({_inst_term(rule, fresh)},N)",
                    "N<M",
                    f"holds({lit.atom.render()})",
                    "max_ab_lvl(M)",
                ],
            )
        )
    return out


def emit_ag2_exp(rule: Rule) -> list[str]:
    """Level-preserving rebinding rules; head first, then the body literals.

    Every rule yields one holds-triggered and one query-triggered rebinding
    per atom (head included), so 2*(len(body)+1) statements in total.
    """
    fresh = _fresh_args(rule)
    atoms = [rule.head] + [l.atom for l in rule.body]
    out: list[str] = []
    for atom in atoms:
        out.append(
            _rule_stmt(
                f"createSub({_inst_term(rule, _masked_args(rule, atom))},N)",
                [f"createSub({_inst_term(rule, fresh)},N)", f"holds({atom.render()})"],
            )
        )
    for atom in atoms:
        out.append(
            _rule_stmt(
                f"createSub({_inst_term(rule, _masked_args(rule, atom))},N)",
                [f"createSub({_inst_term(rule, fresh)},N)", f"query({atom.render()},L)"],
            )
        )
    return out


def emit_ag3(variant: str) -> list[str]:
    """Query propagation from explains atoms; exp and semi-res also re-derive heads."""
    out = [_rule_stmt("query(X,N)", ["explains(X,Y,N)", "max_ab_lvl(M)", "N<M"])]
    if variant in ("exp", "semi-res"):
        out.append(_rule_stmt("query(Y,N-1)", ["explains(X,Y,N)", "max_ab_lvl(M)", "0<N", "N<M"]))
    return out


def emit_support(task: TaskSpec) -> list[str]:
    out = [
        f"max_ab_lvl({task.max_ab_lvl}).",
        _rule_stmt("query(Q,0)", ["generate_proof(Q)"]),
        _rule_stmt("{abducedFact(X)}", ["query(X,L)"]),
        _rule_stmt("holds(X)", ["abducedFact(X)"]),
        _rule_stmt("holds(X)", ["user_input(pos,X)"]),
    ]
    for fact in task.user_facts:
        out.append(f"user_input(pos,{fact.render()}).")
    for pattern in task.blocklist:
        out.append(_constraint_stmt([f"abducedFact({pattern.atom.render()})"]))
    out.append(":~abducedFact(X).[1@1,X]")
    return out


def goal_placeholders(query: Query) -> dict[str, Placeholder]:
    """Distinct goal variables, in first-occurrence order, to v1, v2, ..."""
    mapping: dict[str, Placeholder] = {}
    for name in query.atom.variables():
        if name not in mapping:
            mapping[name] = Placeholder(len(mapping) + 1)
    return mapping


def goal_proof_atom(query: Query) -> Atom:
    """Query atom with its variables replaced by placeholder constants."""
    mapping = goal_placeholders(query)
    args = tuple(mapping[t.name] if isinstance(t, Variable) else t for t in query.atom.args)
    return Atom(query.atom.predicate, args)


def _check_placeholder_collision(task: TaskSpec) -> None:
    used = goal_placeholders(task.query)
    if not used:
        return
    indices = {p.index for p in used.values()}
    clashes = sorted(
        t.render() for t in task.constants() if isinstance(t, Placeholder) and t.index in indices
    )
    if clashes:
        raise EncodingError(
            f"constant(s) {', '.join(clashes)} collide with the fresh goal placeholders; rename them"
        )


def emit_goal(query: Query) -> list[str]:
    """Exactly three statements: proof seed, goal rule, goal constraint."""
    if query.negated:
        return [
            f"generate_proof({query.atom.render()}).",
            _rule_stmt("goal", [f"not holds({query.atom.render()})"]),
            ":- not goal.",
        ]
    proof_atom = goal_proof_atom(query)
    return [
        f"generate_proof({proof_atom.render()}).",
        _rule_stmt("goal", [f"holds({query.atom.render()})"]),
        ":- not goal.",
    ]


def emit_justification(rules: RuleSet, graph_depth: int, root: Atom) -> list[str]:
    """Edge-producing rules per source rule plus the fixed supporting block."""
    out: list[str] = []
    for rule in rules.rules:
        shared = (
            [_wrap_holds(rule.head)]
            + [_wrap_literal(l) for l in rule.body]
            + [f"justify({rule.head.render()},N)"]
        )
        for lit in rule.body:
            sign = "neg" if lit.negated else "pos"
            out.append(
                _rule_stmt(
                    f"causedBy({sign},{lit.atom.render()},{rule.head.render()},N+1)",
                    shared,
                )
            )
    out.extend(
        [
            _rule_stmt("justify(X,N)", ["causedBy(pos,X,Y,N)", "not user_input(pos,X)", "N<M", "max_graph_lvl(M)"]),
            _rule_stmt("directedEdge(Sgn,X,Y)", ["causedBy(Sgn,X,Y,M)"]),
            _rule_stmt("justify(X,0)", ["gen_graph(X)", "not user_input(pos,X)"]),
            _rule_stmt("directedEdge(pos,userFact,X)", ["directedEdge(pos,X,Y)", "user_input(pos,X)"]),
            _rule_stmt("directedEdge(pos,userFact,X)", ["gen_graph(X)", "user_input(pos,X)"]),
            f"gen_graph({root.render()}).",
            f"max_graph_lvl({graph_depth}).",
        ]
    )
    return out


# ---------------------------------------------------------------------------
# Whole-program assembly


def compile_task(task: TaskSpec, include_justification: bool = False) -> DerivedProgram:
    """Concatenate support, goal, forward, AG1, AG2, AG3 and optional graph code."""
    _check_placeholder_collision(task)

    sections: list[list[str]] = [emit_support(task), emit_goal(task.query)]
    sections.append(emit_forward(task.rules, task.constraints))

    ag1: list[str] = []
    for rule in task.rules.rules:
        ag1.extend(emit_ag1(rule, skolemize(rule, task.variant)))
    sections.append(ag1)

    ag2: list[str] = []
    for rule in task.rules.rules:
        if task.variant == "res":
            ag2.extend(emit_ag2_res(rule))
        else:
            ag2.extend(emit_ag2_exp(rule))
    sections.append(ag2)

    sections.append(emit_ag3(task.variant))

    if include_justification:
        sections.append(emit_justification(task.rules, task.graph_depth, goal_proof_atom(task.query)))

    text = "\n\n".join("\n".join(s) for s in sections if s) + "\n"
    return DerivedProgram(
        text=text,
        variant=task.variant,
        max_ab_lvl=task.max_ab_lvl,
        rule_table=tuple((r.id, r) for r in task.rules.rules),
        has_justification=include_justification,
        graph_depth=task.graph_depth,
    )
