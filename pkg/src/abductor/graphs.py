"""Backward-chaining graph structures for studying implicit term substitution.

``build_abstract`` replays only the instantiation and propagation fragment
of the derived program (no choices, no forward rules), which makes the
resulting node and instance sets directly comparable with solver models.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Atom,
    Placeholder,
    RuleSet,
    SkolemTerm,
    TaskSpec,
    Term,
    Variable,
    match_atom,
    substitute_atom,
)

Substitution = dict[Term, Term]


class GraphError(Exception):
    pass


@dataclass(frozen=True)
class QueryNode:
    atom: Atom
    level: int

    def render(self) -> str:
        return f"query({self.atom.render()},{self.level})"


@dataclass(frozen=True)
class InstanceEntry:
    rule_id: int
    args: tuple[Term, ...]
    level: int

    def render(self) -> str:
        inner = f"subInst_r{self.rule_id}"
        if self.args:
            inner += f"({','.join(a.render() for a in self.args)})"
        return f"createSub({inner},{self.level})"


@dataclass(frozen=True)
class AbstractProofGraph:
    nodes: tuple[QueryNode, ...]  # generation order
    edges: frozenset[tuple[QueryNode, QueryNode]]  # (child, parent)

    def node_set(self) -> frozenset[QueryNode]:
        return frozenset(self.nodes)

    def terms(self) -> set[Term]:
        return {t for n in self.nodes for t in n.atom.args}


@dataclass(frozen=True)
class InstanceSet:
    entries: frozenset[InstanceEntry]


@dataclass(frozen=True)
class ConcreteProofGraph:
    nodes: frozenset[QueryNode]
    edges: frozenset[tuple[QueryNode, QueryNode]]


@dataclass(frozen=True)
class ConcreteInstanceSet:
    entries: frozenset[InstanceEntry]


def build_abstract(rules: RuleSet, predicate: str, n: int, arity: int | None = None) -> tuple[AbstractProofGraph, InstanceSet]:
    """Simulate level-bounded backward instantiation from a placeholder goal.

    Nodes appear in breadth-first generation order (level, then rule id,
    then body position); an edge (child, parent) links each generated body
    atom to the head instantiation that produced it.
    """
    for rule in rules.rules:
        if any(l.negated for l in rule.body):
            raise GraphError(f"rule {rule.id} uses negation as failure")
    if arity is None:
        arity = rules.predicates().get(predicate)
        if arity is None:
            raise GraphError(f"predicate {predicate!r} does not occur in the rules; pass its arity")

    root = QueryNode(Atom(predicate, tuple(Placeholder(i + 1) for i in range(arity))), 0)
    nodes: list[QueryNode] = [root]
    seen: set[QueryNode] = {root}
    edges: set[tuple[QueryNode, QueryNode]] = set()
    entries: set[InstanceEntry] = set()
    queue: list[QueryNode] = [root]

    while queue:
        node = queue.pop(0)
        if node.level >= n:
            continue
        for rule in sorted(rules.rules, key=lambda r: r.id):
            binding = match_atom(rule.head, node.atom)
            if binding is None:
                continue
            head_vars = set(rule.head_vars())
            skolem_args = tuple(binding[v] for v in rule.var_order if v in head_vars)
            for v in rule.existential_vars():
                binding[v] = SkolemTerm(rule.id, v, skolem_args)
            entries.add(
                InstanceEntry(rule.id, tuple(binding[v] for v in rule.var_order), node.level + 1)
            )
            for lit in rule.body:
                child = QueryNode(substitute_atom(lit.atom, binding), node.level + 1)
                edges.add((child, node))
                if child not in seen:
                    seen.add(child)
                    nodes.append(child)
                    queue.append(child)
    return AbstractProofGraph(tuple(nodes), frozenset(edges)), InstanceSet(frozenset(entries))


def minimize(graph: AbstractProofGraph) -> AbstractProofGraph:
    """Drop same-level duplicates (keeping the earliest) and deeper re-occurrences."""
    deduped: list[QueryNode] = []
    seen: set[QueryNode] = set()
    for node in graph.nodes:
        if node not in seen:
            seen.add(node)
            deduped.append(node)
    min_level: dict[Atom, int] = {}
    for node in deduped:
        prev = min_level.get(node.atom)
        if prev is None or node.level < prev:
            min_level[node.atom] = node.level
    surviving = [n for n in deduped if n.level == min_level[n.atom]]
    kept = set(surviving)
    edges = frozenset((c, p) for c, p in graph.edges if c in kept and p in kept)
    return AbstractProofGraph(tuple(surviving), edges)


def apply_node(node: QueryNode, theta: Substitution) -> QueryNode:
    # Substitutions act on whole argument terms, never on subterms.
    return QueryNode(
        Atom(node.atom.predicate, tuple(theta.get(t, t) for t in node.atom.args)), node.level
    )


def apply_subst(
    graph_min: AbstractProofGraph, instances: InstanceSet, theta: Substitution
) -> tuple[ConcreteProofGraph, ConcreteInstanceSet]:
    nodes = frozenset(apply_node(n, theta) for n in graph_min.nodes)
    edges = frozenset((apply_node(c, theta), apply_node(p, theta)) for c, p in graph_min.edges)
    entries = frozenset(
        InstanceEntry(e.rule_id, tuple(theta.get(t, t) for t in e.args), e.level)
        for e in instances.entries
    )
    return ConcreteProofGraph(nodes, edges), ConcreteInstanceSet(entries)


def preimages(graph_min: AbstractProofGraph, theta: Substitution, concrete: QueryNode) -> frozenset[QueryNode]:
    found = frozenset(n for n in graph_min.nodes if apply_node(n, theta) == concrete)
    if not found:
        raise GraphError(f"{concrete.render()} is not in the concrete graph")
    return found


def derived_subst(
    theta: Substitution, q_c: QueryNode, q_o: QueryNode, q_f: QueryNode
) -> Substitution:
    """Positional refinement of theta that sends q_o to q_f instead of q_c.

    Fails when the positional map would send one source term to two
    different targets.
    """
    if not (q_c.atom.predicate == q_o.atom.predicate == q_f.atom.predicate):
        raise GraphError("derived substitution requires matching predicates")
    if not (q_c.atom.arity == q_o.atom.arity == q_f.atom.arity):
        raise GraphError("derived substitution requires matching arities")
    if not (q_c.level == q_o.level == q_f.level):
        raise GraphError("derived substitution requires matching levels")
    psi: Substitution = {}
    for source, target in zip(q_o.atom.args, q_f.atom.args):
        if source in psi and psi[source] != target:
            raise GraphError(
                f"positional map sends {source.render()} to both "
                f"{psi[source].render()} and {target.render()}"
            )
        psi[source] = target
    phi = dict(theta)
    phi.update(psi)
    return phi


# ---------------------------------------------------------------------------
# Spot-checking the substitution theorem on concrete tasks


@dataclass(frozen=True)
class TermSubVerdict:
    ok: bool
    missing_base: tuple[str, ...]
    missing_extended: tuple[str, ...]
    phi: tuple[tuple[str, str], ...]

    def render(self) -> str:
        if self.ok:
            return "term-substitution check passed"
        parts = []
        if self.missing_base:
            parts.append(f"missing in base model: {', '.join(self.missing_base)}")
        if self.missing_extended:
            parts.append(f"missing in extended model: {', '.join(self.missing_extended)}")
        return "; ".join(parts)


def _required_atoms(
    graph_min: AbstractProofGraph, instances: InstanceSet, subst: Substitution
) -> set[str]:
    concrete_graph, concrete_inst = apply_subst(graph_min, instances, subst)
    return {n.render() for n in concrete_graph.nodes} | {e.render() for e in concrete_inst.entries}


def check_theorem_termsub(
    task: TaskSpec,
    theta: Substitution,
    q_c: QueryNode,
    q_o: QueryNode,
    q_f: QueryNode,
    corollary: bool = False,
    cfg=None,
) -> TermSubVerdict:
    """Assert the substituted graph and instance set survive adding a fact.

    The base semi-res program must have an answer set containing the
    substituted query atoms and instance tuples; after injecting the new
    query fact (or ``user_input`` fact, for the corollary reading) some
    answer set must contain their refined images.
    """
    from .encode import compile_task
    from .solver import SolverConfig, solve_text

    if task.variant != "semi-res":
        task = TaskSpec(
            rules=task.rules,
            query=task.query,
            user_facts=task.user_facts,
            blocklist=task.blocklist,
            constraints=task.constraints,
            depth=task.depth,
            variant="semi-res",
            graph_depth=task.graph_depth,
        )
    cfg = cfg or SolverConfig()

    graph, instances = build_abstract(task.rules, task.query.atom.predicate, task.depth)
    graph_min = minimize(graph)
    if q_o not in set(graph_min.nodes):
        raise GraphError(f"{q_o.render()} is not a node of the minimal abstract graph")
    if apply_node(q_o, theta) != q_c:
        raise GraphError(f"{q_o.render()} is not a preimage of {q_c.render()}")
    phi = derived_subst(theta, q_c, q_o, q_f)

    program = compile_task(task)

    def missing(result, wanted: set[str]) -> tuple[str, ...]:
        best: tuple[str, ...] | None = None
        for model in result.models:
            rendered = set(m for m in (a.render() for a in model.atoms))
            gap = tuple(sorted(wanted - rendered))
            if not gap:
                return ()
            if best is None or len(gap) < len(best):
                best = gap
        return best if best is not None else tuple(sorted(wanted))

    base_result = solve_text(program.text, cfg)
    if base_result.status not in ("optimumFound", "satisfiable"):
        raise GraphError(f"base solve failed: {base_result.status}")
    missing_base = missing(base_result, _required_atoms(graph_min, instances, theta))

    if corollary:
        extra = f"user_input(pos,{q_f.atom.render()})."
    else:
        extra = f"query({q_f.atom.render()},{q_f.level})."
    extended_result = solve_text(program.text + extra + "\n", cfg)
    if extended_result.status not in ("optimumFound", "satisfiable"):
        raise GraphError(f"extended solve failed: {extended_result.status}")
    missing_extended = missing(extended_result, _required_atoms(graph_min, instances, phi))

    return TermSubVerdict(
        ok=not missing_base and not missing_extended,
        missing_base=missing_base,
        missing_extended=missing_extended,
        phi=tuple(sorted((k.render(), v.render()) for k, v in phi.items())),
    )
