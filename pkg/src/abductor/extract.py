"""Projection of solver models into abductive solutions and justification graphs."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import Atom, Constant, FuncTerm, Term
from .solver import Model, SolveResult

USER_FACT = "userFact"


class ExtractionError(Exception):
    pass


def term_to_atom(term: Term) -> Atom:
    """Unwrap an atom stored as a term argument of a meta predicate."""
    if isinstance(term, FuncTerm):
        return Atom(term.name, term.args)
    if isinstance(term, Constant):
        return Atom(term.symbol, ())
    raise ExtractionError(f"term {term.render()} does not encode an atom")


@dataclass(frozen=True)
class AbductiveSolution:
    abduced: frozenset[Atom]
    holds: frozenset[Atom]
    cost: int

    def rendered_abduced(self) -> list[str]:
        return sorted(a.render() for a in self.abduced)

    def rendered_holds(self) -> list[str]:
        return sorted(a.render() for a in self.holds)


@dataclass(frozen=True)
class JustificationGraph:
    # Edges run from the supporting atom (or the userFact marker) to the
    # supported atom; sign "neg" marks negation-as-failure support.
    edges: frozenset[tuple[str, Atom | str, Atom]]
    roots: frozenset[Atom]

    def rendered_edges(self) -> list[tuple[str, str, str]]:
        out = [
            (sign, src if isinstance(src, str) else src.render(), dst.render())
            for sign, src, dst in self.edges
        ]
        return sorted(out)


def extract_solution(model: Model) -> AbductiveSolution:
    abduced: set[Atom] = set()
    holds: set[Atom] = set()
    for atom in model.atoms:
        if atom.predicate == "abducedFact":
            if len(atom.args) != 1:
                raise ExtractionError(f"abducedFact with arity {len(atom.args)}")
            abduced.add(term_to_atom(atom.args[0]))
        elif atom.predicate == "holds":
            if len(atom.args) != 1:
                raise ExtractionError(f"holds with arity {len(atom.args)}")
            holds.add(term_to_atom(atom.args[0]))
    cost = len(abduced)
    if model.cost is not None and model.cost != cost:
        raise ExtractionError(f"solver cost {model.cost} != |abduced| = {cost}")
    return AbductiveSolution(frozenset(abduced), frozenset(holds), cost)


def extract_graph(model: Model) -> JustificationGraph:
    edges: set[tuple[str, Atom | str, Atom]] = set()
    roots: set[Atom] = set()
    for atom in model.atoms:
        if atom.predicate == "directedEdge":
            if len(atom.args) != 3:
                raise ExtractionError(f"directedEdge with arity {len(atom.args)}")
            sign_term, src_term, dst_term = atom.args
            if not isinstance(sign_term, Constant) or sign_term.symbol not in ("pos", "neg"):
                raise ExtractionError(f"bad edge sign in {atom.render()}")
            src: Atom | str
            if isinstance(src_term, Constant) and src_term.symbol == USER_FACT:
                src = USER_FACT
            else:
                src = term_to_atom(src_term)
            edges.add((sign_term.symbol, src, term_to_atom(dst_term)))
        elif atom.predicate == "gen_graph":
            if len(atom.args) != 1:
                raise ExtractionError(f"gen_graph with arity {len(atom.args)}")
            roots.add(term_to_atom(atom.args[0]))
    return JustificationGraph(frozenset(edges), frozenset(roots))


def to_dot(graph: JustificationGraph) -> str:
    """Graphviz rendering; neg edges dashed, userFact drawn as a box."""
    edges = sorted(graph.rendered_edges(), key=lambda e: (e[1], e[2], e[0]))
    nodes: set[str] = set()
    for _, src, dst in edges:
        nodes.add(src)
        nodes.add(dst)
    nodes |= {r.render() for r in graph.roots}
    if not nodes and not edges:
        return "digraph justification {}\n"
    lines = ["digraph justification {"]
    for node in sorted(nodes):
        if node == USER_FACT:
            lines.append(f'  "{USER_FACT}" [shape=box,style=filled];')
        else:
            lines.append(f'  "{node}";')
    for sign, src, dst in edges:
        attrs = ' [style=dashed,label="not"]' if sign == "neg" else ""
        lines.append(f'  "{src}" -> "{dst}"{attrs};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_payload(graph: JustificationGraph | None) -> dict:
    if graph is None:
        return {"roots": [], "edges": []}
    return {
        "roots": sorted(r.render() for r in graph.roots),
        "edges": [
            {"sign": sign, "from": src, "to": dst} for sign, src, dst in graph.rendered_edges()
        ],
    }


def to_json(
    solution: AbductiveSolution | None,
    graph: JustificationGraph | None = None,
    status: str = "optimumFound",
    all_optimal: list[AbductiveSolution] | None = None,
) -> str:
    payload = {
        "status": status,
        "cost": solution.cost if solution else 0,
        "abduced": solution.rendered_abduced() if solution else [],
        "holds": solution.rendered_holds() if solution else [],
        "graph": graph_payload(graph),
        "all_optimal": [s.rendered_abduced() for s in (all_optimal or ([solution] if solution else []))],
    }
    return json.dumps(payload, indent=2)


def result_bundle(result: SolveResult, with_graph: bool) -> dict:
    """Solution + graph + enumeration summary for one solve call."""
    optimal = result.optimal_models()
    solution = extract_solution(optimal[0]) if optimal else None
    graph = extract_graph(optimal[0]) if (optimal and with_graph) else None
    return {
        "status": result.status,
        "cost": solution.cost if solution else None,
        "abduced": solution.rendered_abduced() if solution else [],
        "holds": solution.rendered_holds() if solution else [],
        "graph": graph_payload(graph),
        "all_optimal": sorted(extract_solution(m).rendered_abduced() for m in optimal),
    }
