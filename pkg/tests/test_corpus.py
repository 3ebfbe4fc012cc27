from abductor.corpus import generate_simple_tasks
from abductor.model import classify_simple, validate_ruleset


def test_generation_is_deterministic():
    a = generate_simple_tasks(count=10, seed=7)
    b = generate_simple_tasks(count=10, seed=7)
    assert [e.task for e in a] == [e.task for e in b]
    c = generate_simple_tasks(count=10, seed=8)
    assert [e.task for e in c] != [e.task for e in a]


def test_generated_tasks_are_simple_and_bounded():
    entries = generate_simple_tasks(count=25, seed=11)
    assert len(entries) == 25
    for entry in entries:
        task = entry.task
        assert validate_ruleset(task.rules) == []
        assert classify_simple(task).is_simple
        assert 1 <= len(task.rules.rules) <= 3
        assert all(r.head.arity <= 2 for r in task.rules.rules)
        assert 1 <= task.depth <= 3
        assert task.variant == "res"
        assert entry.candidate_count <= 24
