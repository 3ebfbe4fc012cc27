import subprocess
import sys

import pytest

from abductor.groundsolve import ProgramError, render_atom, solve_program


def models_of(text):
    status, results, solver = solve_program(text)
    rendered = [
        (frozenset(render_atom(solver.names[a]) for a in model), cost) for model, cost in results
    ]
    return status, rendered


def test_direct_contradiction_unsat():
    status, models = models_of("a. :- a.")
    assert status == "UNSATISFIABLE" and models == []


def test_facts_and_definite_rules():
    status, models = models_of("r(alpha). p(X):-r(X).")
    assert status == "SATISFIABLE"
    assert models == [(frozenset({"r(alpha)", "p(alpha)"}), None)]


def test_even_negation_loop_has_two_models():
    text = "r(alpha). p(X):-r(X),not q(X). q(X):-r(X), not p(X)."
    status, models = models_of(text)
    assert status == "SATISFIABLE"
    sets = {m for m, _ in models}
    assert sets == {
        frozenset({"r(alpha)", "p(alpha)"}),
        frozenset({"r(alpha)", "q(alpha)"}),
    }


def test_constraint_eliminates_one_loop_model():
    text = "r(alpha). p(X):-r(X),not q(X). q(X):-r(X), not p(X). :-q(X)."
    status, models = models_of(text)
    assert [m for m, _ in models] == [frozenset({"r(alpha)", "p(alpha)"})]


def test_choice_rule_enumerates_both_branches():
    status, models = models_of("r(alpha). {q(X)}:-r(X).")
    sets = {m for m, _ in models}
    assert sets == {frozenset({"r(alpha)"}), frozenset({"r(alpha)", "q(alpha)"})}


def test_unfounded_choice_is_not_a_model():
    # q(beta) never becomes available: no query-style support
    status, models = models_of("r(alpha). {q(X)}:-r(X). :- not q(beta).")
    assert status == "UNSATISFIABLE"


def test_weak_constraint_minimizes_distinct_instances():
    text = """
    item(a). item(b).
    {pick(X)} :- item(X).
    covered :- pick(a).
    covered :- pick(b).
    :- not covered.
    :~pick(X).[1@1,X]
    """
    status, models = models_of(text)
    assert status == "OPTIMUM FOUND"
    assert {m for m, _ in models} == {
        frozenset({"item(a)", "item(b)", "pick(a)", "covered"}),
        frozenset({"item(a)", "item(b)", "pick(b)", "covered"}),
    }
    assert all(cost == 1 for _, cost in models)


def test_arithmetic_guards_and_levels():
    text = """
    lvl(3).
    base(0).
    step(N+1) :- base(N), lvl(M), N<M-1.
    step(N+1) :- step(N), lvl(M), N<M-1.
    """
    status, models = models_of(text)
    atoms = next(iter(models))[0]
    assert "step(1)" in atoms and "step(2)" in atoms and "step(3)" not in atoms


def test_nested_function_terms_ground():
    text = "g(f(f(a))). h(X):-g(X)."
    status, models = models_of(text)
    assert ("h(f(f(a)))" in next(iter(models))[0])


def test_determinism_of_enumeration():
    text = "item(a). item(b). {pick(X)}:-item(X). ok:-pick(a). ok:-pick(b). :- not ok. :~pick(X).[1@1,X]"
    assert models_of(text) == models_of(text)


def test_parse_error_raises():
    with pytest.raises(ProgramError):
        solve_program("p(X) :- q(X")


def test_cli_protocol_and_exit_codes(tmp_path):
    cmd = [sys.executable, "-m", "abductor.groundsolve", "--opt-mode=optN", "0", "-"]
    sat = subprocess.run(cmd, input="a. b:-a.", capture_output=True, text=True)
    assert sat.returncode == 30
    assert "Answer: 1" in sat.stdout and "SATISFIABLE" in sat.stdout

    unsat = subprocess.run(cmd, input="a. :- a.", capture_output=True, text=True)
    assert unsat.returncode == 20 and "UNSATISFIABLE" in unsat.stdout

    bad = subprocess.run(cmd, input="p(X :- q.", capture_output=True, text=True)
    assert bad.returncode == 65 and "ERROR" in bad.stderr

    # file arguments work like clingo's
    path = tmp_path / "prog.lp"
    path.write_text("a.")
    from_file = subprocess.run(
        [sys.executable, "-m", "abductor.groundsolve", str(path)], capture_output=True, text=True
    )
    assert from_file.returncode == 30 and "a" in from_file.stdout
