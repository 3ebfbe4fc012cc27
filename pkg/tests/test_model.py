import hypothesis.strategies as st
from hypothesis import given

from abductor.model import (
    Atom,
    BlockPattern,
    Constant,
    EXT_VAR,
    Literal,
    Placeholder,
    Query,
    Rule,
    RuleSet,
    SkolemTerm,
    TaskSpec,
    Variable,
    classify_simple,
    skolem_depth,
    validate_ruleset,
)
from abductor.parse import parse_rules, parse_task


def rule(rid, head, *body):
    return Rule(id=rid, head=head, body=tuple(body))


def atom(pred, *args):
    return Atom(pred, tuple(args))


X, Y, Z = Variable("X"), Variable("Y"), Variable("Z")
john = Constant("john")


def test_term_rendering():
    assert Placeholder(2).render() == "v2"
    assert EXT_VAR.render() == "extVar"
    sk = SkolemTerm(1, "R", (SkolemTerm(1, "R", (john,)),))
    assert sk.render() == "skolemFn_r1_R(skolemFn_r1_R(john))"
    assert skolem_depth(sk) == 2
    assert atom("p").render() == "p"
    assert Literal(atom("q", X), negated=True).render() == "not q(X)"


def test_var_order_first_occurrence():
    r = rule(1, atom("p", Y, X), Literal(atom("q", X)), Literal(atom("r", X, Y)), Literal(atom("s", Z)))
    assert r.var_order == ("Y", "X", "Z")
    assert r.existential_vars() == ["Z"]


@given(st.permutations(["X", "Y", "Z", "W"]))
def test_var_order_is_permutation_of_rule_vars(names):
    body = tuple(Literal(atom("b", Variable(n))) for n in names)
    r = rule(1, atom("h", Variable(names[0])), *body)
    assert sorted(r.var_order) == sorted(set(names))


def test_validate_accepts_safe_naf_rule():
    r = rule(5, atom("a", X), Literal(atom("b", X, Y, Z)), Literal(atom("c", X), True), Literal(atom("d", Y), True))
    assert validate_ruleset(RuleSet((r,))) == []


def test_validate_rejects_unbound_head_var():
    r = rule(1, atom("p", X), Literal(atom("q", Y)))
    violations = validate_ruleset(RuleSet((r,)))
    assert any(v.assumption == 3 for v in violations)


def test_validate_rejects_unsafe_naf_var():
    r = rule(1, atom("p", X), Literal(atom("q", X)), Literal(atom("r", Z), True))
    violations = validate_ruleset(RuleSet((r,)))
    assert any(v.assumption == 5 for v in violations)


def test_validate_rejects_arity_clash_and_duplicate_ids():
    r1 = rule(1, atom("p", X), Literal(atom("q", X)))
    r2 = rule(1, atom("p", X, Y), Literal(atom("q", X)), Literal(atom("q", Y)))
    violations = validate_ruleset(RuleSet((r1, r2)))
    assert any(v.assumption == 6 for v in violations)
    assert any("arity" in v.message for v in violations)


def test_validate_is_pure():
    r = rule(1, atom("p", X), Literal(atom("q", Y)))
    rs = RuleSet((r,))
    assert validate_ruleset(rs) == validate_ruleset(rs)


def block(text):
    from abductor.parse import parse_atom_text

    return BlockPattern(parse_atom_text(text, allow_wildcards=True))


def simple_task(**kwargs):
    rs = parse_rules("a(X):-c(X),d(X,Y).\nb(X,Y):-d(X,Y).").value
    defaults = dict(
        rules=rs,
        query=Query(atom("a", john)),
        blocklist=(block("a(_)"), block("b(_,_)")),
        depth=2,
    )
    defaults.update(kwargs)
    return TaskSpec(**defaults)


def test_classify_simple_accepts_blocked_pair_task():
    report = classify_simple(simple_task())
    assert report.is_simple and report.violations == ()


def test_classify_flags_ground_block_pattern():
    report = classify_simple(simple_task(blocklist=(block("a(john)"), block("b(_,_)"))))
    assert not report.is_simple
    assert {c for c, _ in report.violations} == {5}


def test_classify_flags_repeated_head_vars():
    rs = RuleSet((rule(1, atom("p", X, X), Literal(atom("r", X, X, Y))),))
    report = classify_simple(simple_task(rules=rs, query=Query(atom("p", john, john)), blocklist=()))
    assert (3, "rule 1 repeats a variable in its head") in report.violations


def test_classify_flags_naf_constraints_fact_and_query():
    rs = parse_rules("a(X):-c(X), not d(X).").value
    task = TaskSpec(
        rules=rs,
        query=Query(atom("a", X)),
        user_facts=(atom("c", john),),
        blocklist=(block("c(_)"),),
        constraints=parse_task('{"query":"a(john)","depth":1,"deny_model":[":- d(X)"]}', rs).value.constraints,
        depth=1,
    )
    codes = {c for c, _ in classify_simple(task).violations}
    assert codes == {1, 4, 6, 7}


def test_block_pattern_matching_binds_repeats():
    pat = BlockPattern(atom("p", X, X))
    assert pat.matches(atom("p", john, john))
    assert not pat.matches(atom("p", john, Constant("mary")))


def test_classify_bundled_fixtures():
    from conftest import load_fixture

    # ground block pattern makes the mutual-recursion task non-simple
    mutual = classify_simple(load_fixture("mutual"))
    assert not mutual.is_simple
    assert {c for c, _ in mutual.violations} == {5}

    # the two-rule chain task with fully un-ground blocks is simple
    assert classify_simple(load_fixture("pair")).is_simple
