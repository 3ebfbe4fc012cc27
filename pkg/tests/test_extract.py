import json

import pytest

from abductor.extract import (
    ExtractionError,
    extract_graph,
    extract_solution,
    to_dot,
    to_json,
    JustificationGraph,
    USER_FACT,
)
from abductor.model import Atom, Constant
from abductor.solver import Model, parse_model_atom
from conftest import solve_fixture


def model_from(tokens, cost=None):
    return Model(atoms=frozenset(parse_model_atom(t) for t in tokens), cost=cost)


def test_extract_solution_unwraps_and_checks_cost():
    model = model_from(
        ["abducedFact(q(john,james))", "abducedFact(s(james))", "holds(q(john,james))",
         "holds(s(james))", "holds(p(john,james))", "goal"],
        cost=2,
    )
    solution = extract_solution(model)
    assert solution.rendered_abduced() == ["q(john,james)", "s(james)"]
    assert solution.cost == 2
    assert Atom("p", (Constant("john"), Constant("james"))) in solution.holds
    assert solution.abduced <= solution.holds


def test_extract_solution_empty_and_propositional():
    assert extract_solution(model_from([])).cost == 0
    sol = extract_solution(model_from(["abducedFact(p)", "holds(p)"]))
    assert sol.rendered_abduced() == ["p"]


def test_extract_cost_mismatch_rejected():
    with pytest.raises(ExtractionError):
        extract_solution(model_from(["abducedFact(q(a))"], cost=5))


def test_extract_graph_edges_and_roots():
    model = model_from(
        [
            "directedEdge(pos,relB(john,james),relA(john))",
            "directedEdge(neg,relC(john,james),relA(john))",
            "directedEdge(pos,userFact,relD(john,james,mary))",
            "gen_graph(relA(john))",
        ]
    )
    graph = extract_graph(model)
    assert ("neg", "relC(john,james)", "relA(john)") in graph.rendered_edges()
    assert ("pos", USER_FACT, "relD(john,james,mary)") in graph.rendered_edges()
    assert {r.render() for r in graph.roots} == {"relA(john)"}


def test_extract_graph_empty():
    graph = extract_graph(model_from(["holds(a)"]))
    assert graph.edges == frozenset() and graph.roots == frozenset()


def test_root_that_is_a_user_fact(solver_cfg):
    # justification of a goal that is itself supplied by the user
    from abductor.encode import compile_task
    from abductor.parse import parse_rules, parse_task
    from abductor.solver import solve

    rules = parse_rules("b(X):-a(X).").value
    task = parse_task('{"query":"a(john)","depth":1,"facts":["a(john)"]}', rules).value
    result = solve(compile_task(task, include_justification=True), solver_cfg)
    graph = extract_graph(result.best_model())
    assert graph.rendered_edges() == [("pos", USER_FACT, "a(john)")]


def test_to_dot_output():
    graph = extract_graph(
        model_from(
            [
                "directedEdge(pos,b(x),a(x))",
                "directedEdge(neg,c(x),a(x))",
                "directedEdge(pos,userFact,b(x))",
            ]
        )
    )
    dot = to_dot(graph)
    assert dot.startswith("digraph justification {")
    assert '"b(x)" -> "a(x)";' in dot
    assert '"c(x)" -> "a(x)" [style=dashed,label="not"];' in dot
    assert '"userFact" [shape=box,style=filled];' in dot
    assert to_dot(JustificationGraph(frozenset(), frozenset())) == "digraph justification {}\n"
    # deterministic and lexicographic
    assert dot == to_dot(graph)
    edge_lines = [l for l in dot.splitlines() if "->" in l]
    assert edge_lines == sorted(edge_lines)


def test_to_json_schema():
    model = model_from(["abducedFact(q(john,james))", "abducedFact(s(james))", "holds(q(john,james))"])
    solution = extract_solution(model)
    payload = json.loads(to_json(solution, None, status="optimumFound"))
    assert list(payload) == ["status", "cost", "abduced", "holds", "graph", "all_optimal"]
    assert payload["abduced"] == ["q(john,james)", "s(james)"]
    assert payload["cost"] == 2
    empty = json.loads(to_json(None))
    assert empty["abduced"] == [] and empty["cost"] == 0


def test_graph_depth_bound(solver_cfg):
    result = solve_fixture("graphdemo", solver_cfg, justify=True)
    graph = extract_graph(result.best_model())
    # longest root-to-leaf chain stays within the instrumented bound
    children = {}
    for sign, src, dst in graph.rendered_edges():
        children.setdefault(dst, []).append(src)

    def depth(node, seen=()):
        if node in seen or node == USER_FACT:
            return 0
        return 1 + max((depth(c, seen + (node,)) for c in children.get(node, [])), default=0)

    task_depth = 5
    for root in graph.roots:
        assert depth(root.render()) <= task_depth


def test_positive_edges_match_rule_instantiations(solver_cfg):
    # every non-userFact pos edge is witnessed by a source-rule instantiation
    from abductor.model import match_atom, substitute_atom
    from conftest import load_fixture

    task = load_fixture("graphdemo")
    result = solve_fixture("graphdemo", solver_cfg, justify=True)
    graph = extract_graph(result.best_model())
    for sign, src, dst in graph.edges:
        if src == USER_FACT:
            continue
        witnessed = False
        for rule in task.rules.rules:
            binding = match_atom(rule.head, dst)
            if binding is None:
                continue
            for lit in rule.body:
                if lit.negated != (sign == "neg"):
                    continue
                trial = match_atom(lit.atom, src, binding)
                if trial is not None:
                    witnessed = True
        assert witnessed, (sign, src.render(), dst.render())
