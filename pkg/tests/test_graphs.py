import pytest

from abductor.graphs import (
    GraphError,
    QueryNode,
    apply_node,
    apply_subst,
    build_abstract,
    check_theorem_termsub,
    derived_subst,
    minimize,
    preimages,
)
from abductor.model import Atom, Constant, EXT_VAR, Placeholder, SkolemTerm
from abductor.parse import parse_rules
from conftest import load_fixture

v1 = Placeholder(1)
sk = SkolemTerm(1, "Y", (v1,))
sk2 = SkolemTerm(2, "Z", (v1, sk))
john, james = Constant("john"), Constant("james")
THETA = {v1: john, sk: EXT_VAR, sk2: EXT_VAR}


@pytest.fixture(scope="module")
def pair_graph():
    rules = load_fixture("pair").rules
    return build_abstract(rules, "a", 2)


def test_build_abstract_nodes_and_edges(pair_graph):
    graph, instances = pair_graph
    rendered = {(c.render(), p.render()) for c, p in graph.edges}
    assert rendered == {
        ("query(b(v1,skolemFn_r1_Y(v1)),1)", "query(a(v1),0)"),
        ("query(c(skolemFn_r1_Y(v1)),1)", "query(a(v1),0)"),
        (
            "query(d(v1,skolemFn_r1_Y(v1),skolemFn_r2_Z(v1,skolemFn_r1_Y(v1))),2)",
            "query(b(v1,skolemFn_r1_Y(v1)),1)",
        ),
    }
    assert {e.render() for e in instances.entries} == {
        "createSub(subInst_r1(v1,skolemFn_r1_Y(v1)),1)",
        "createSub(subInst_r2(v1,skolemFn_r1_Y(v1),skolemFn_r2_Z(v1,skolemFn_r1_Y(v1))),2)",
    }


def test_build_abstract_zero_depth():
    rules = load_fixture("pair").rules
    graph, instances = build_abstract(rules, "a", 0)
    assert len(graph.nodes) == 1 and not graph.edges and not instances.entries


def test_build_abstract_rejects_naf():
    rules = parse_rules("a(X):-b(X), not c(X).").value
    with pytest.raises(GraphError):
        build_abstract(rules, "a", 2)


def test_minimize_is_identity_on_pair_graph(pair_graph):
    graph, _ = pair_graph
    assert minimize(graph) == graph


def test_minimize_two_cycle():
    rules = parse_rules("a(X):-b(X).\nb(X):-a(X).").value
    graph, _ = build_abstract(rules, "a", 3)
    assert [n.render() for n in graph.nodes] == [
        "query(a(v1),0)",
        "query(b(v1),1)",
        "query(a(v1),2)",
        "query(b(v1),3)",
    ]
    minimized = minimize(graph)
    assert [n.render() for n in minimized.nodes] == ["query(a(v1),0)", "query(b(v1),1)"]


def test_minimize_keeps_leftmost_duplicate():
    n1 = QueryNode(Atom("a", (v1,)), 0)
    dup = QueryNode(Atom("b", (v1,)), 1)
    from abductor.graphs import AbstractProofGraph

    graph = AbstractProofGraph((n1, dup, dup), frozenset({(dup, n1)}))
    minimized = minimize(graph)
    assert minimized.nodes == (n1, dup)


def test_minimal_graph_parent_property(pair_graph):
    graph, _ = pair_graph
    minimized = minimize(graph)
    nodes = set(minimized.nodes)
    for node in nodes:
        if node.level > 0:
            assert any(
                c == node and p.level == node.level - 1 for c, p in minimized.edges
            ), node.render()


def test_apply_subst_merges_and_identity(pair_graph):
    graph, instances = pair_graph
    minimized = minimize(graph)
    concrete, concrete_inst = apply_subst(minimized, instances, THETA)
    assert {n.render() for n in concrete.nodes} == {
        "query(a(john),0)",
        "query(b(john,extVar),1)",
        "query(c(extVar),1)",
        "query(d(john,extVar,extVar),2)",
    }
    assert {e.render() for e in concrete_inst.entries} == {
        "createSub(subInst_r1(john,extVar),1)",
        "createSub(subInst_r2(john,extVar,extVar),2)",
    }
    identity, identity_inst = apply_subst(minimized, instances, {})
    assert identity.nodes == frozenset(minimized.nodes)

    collapsing = {v1: john, sk: john, sk2: john}
    merged, _ = apply_subst(minimized, instances, collapsing)
    assert QueryNode(Atom("d", (john, john, john)), 2) in merged.nodes


def test_preimages(pair_graph):
    graph, _ = pair_graph
    minimized = minimize(graph)
    q_c = QueryNode(Atom("b", (john, EXT_VAR)), 1)
    assert {n.render() for n in preimages(minimized, THETA, q_c)} == {
        "query(b(v1,skolemFn_r1_Y(v1)),1)"
    }
    # identity substitution: every node is its own single preimage
    for node in minimized.nodes:
        assert preimages(minimized, {}, node) == frozenset({node})
    # collapsing substitution produces a larger preimage set
    rules = parse_rules("a(X):-b(X),c(X).\na(X):-c(X),d(X).").value
    g2, _ = build_abstract(rules, "a", 1)
    gmin2 = minimize(g2)
    collapse = {Placeholder(1): john}
    merged_b = apply_node(QueryNode(Atom("b", (Placeholder(1),)), 1), collapse)
    assert len(preimages(gmin2, {Placeholder(1): john, **{}}, merged_b)) == 1
    with pytest.raises(GraphError):
        preimages(minimized, THETA, QueryNode(Atom("zz", ()), 0))


def test_derived_subst_worked_values():
    q_c = QueryNode(Atom("b", (john, EXT_VAR)), 1)
    q_o = QueryNode(Atom("b", (v1, sk)), 1)
    q_f = QueryNode(Atom("b", (john, james)), 1)
    phi = derived_subst(THETA, q_c, q_o, q_f)
    assert phi == {v1: john, sk: james, sk2: EXT_VAR}


def test_derived_subst_identity_when_target_equals_concrete():
    q_c = QueryNode(Atom("b", (john, EXT_VAR)), 1)
    q_o = QueryNode(Atom("b", (v1, sk)), 1)
    phi = derived_subst(THETA, q_c, q_o, q_c)
    assert phi == THETA


def test_derived_subst_rejects_one_to_many():
    q_o = QueryNode(Atom("p", (v1, v1)), 0)
    q_c = QueryNode(Atom("p", (john, john)), 0)
    q_f = QueryNode(Atom("p", (Constant("a"), Constant("b"))), 0)
    with pytest.raises(GraphError):
        derived_subst({v1: john}, q_c, q_o, q_f)


def test_theorem_checks_on_pair_task(solver_cfg):
    task = load_fixture("pair")
    q_c = QueryNode(Atom("b", (john, EXT_VAR)), 1)
    q_o = QueryNode(Atom("b", (v1, sk)), 1)
    q_f = QueryNode(Atom("b", (john, james)), 1)
    verdict = check_theorem_termsub(task, THETA, q_c, q_o, q_f, cfg=solver_cfg)
    assert verdict.ok, verdict.render()
    assert ("skolemFn_r1_Y(v1)", "james") in verdict.phi

    # no-op refinement: adding the concrete atom itself
    verdict_same = check_theorem_termsub(task, THETA, q_c, q_o, q_c, cfg=solver_cfg)
    assert verdict_same.ok

    # corollary reading: a user fact pins the sibling branch
    qc2 = QueryNode(Atom("c", (EXT_VAR,)), 1)
    qo2 = QueryNode(Atom("c", (sk,)), 1)
    qf2 = QueryNode(Atom("c", (james,)), 1)
    verdict_fact = check_theorem_termsub(task, THETA, qc2, qo2, qf2, corollary=True, cfg=solver_cfg)
    assert verdict_fact.ok, verdict_fact.render()


def test_theorem_check_on_chain_task(solver_cfg):
    task = load_fixture("chain")
    p1 = Placeholder(1)
    skY = SkolemTerm(1, "Y", (p1,))
    skZ = SkolemTerm(2, "Z", (p1, skY))
    theta = {p1: john, skY: EXT_VAR, skZ: EXT_VAR}
    mary = Constant("mary")
    q_c = QueryNode(Atom("relD", (john, EXT_VAR, EXT_VAR)), 2)
    q_o = QueryNode(Atom("relD", (p1, skY, skZ)), 2)
    q_f = QueryNode(Atom("relD", (john, james, mary)), 2)
    verdict = check_theorem_termsub(task, theta, q_c, q_o, q_f, corollary=True, cfg=solver_cfg)
    assert verdict.ok, verdict.render()


def test_build_abstract_matches_stripped_solver_run(solver_cfg):
    # the instantiation fragment alone (seeded root, AG1, AG3) must derive
    # exactly the graph's query atoms and instance entries
    from abductor.corpus import generate_simple_tasks
    from abductor.encode import emit_ag1, emit_ag3, skolemize
    from abductor.solver import solve_text

    for entry in generate_simple_tasks(count=50, seed=2024):
        task = entry.task
        pred = task.query.atom.predicate
        arity = task.query.atom.arity
        graph, instances = build_abstract(task.rules, pred, task.depth)

        root = f"{pred}({','.join(f'v{i+1}' for i in range(arity))})" if arity else pred
        lines = [f"max_ab_lvl({task.depth + 1}).", f"query({root},0)."]
        for rule in task.rules.rules:
            lines.extend(emit_ag1(rule, skolemize(rule, "res")))
        lines.extend(emit_ag3("res"))
        result = solve_text("\n".join(lines) + "\n", solver_cfg)
        assert result.status == "satisfiable", result.raw_output
        model = {a.render() for a in result.models[0].atoms}

        expected = {n.render() for n in graph.nodes} | {e.render() for e in instances.entries}
        derived = {m for m in model if m.startswith(("query(", "createSub("))}
        assert derived == expected, entry.name


def test_concrete_nodes_have_preimages(pair_graph):
    graph, instances = pair_graph
    minimized = minimize(graph)
    concrete, _ = apply_subst(minimized, instances, THETA)
    for node in concrete.nodes:
        assert preimages(minimized, THETA, node)
