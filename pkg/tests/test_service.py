import threading

import pytest
from fastapi.testclient import TestClient

from abductor.service import build_app
from conftest import DATA, ENGINE
from abductor.solver import SolverConfig


@pytest.fixture(scope="module")
def client():
    cfg = SolverConfig(executable=ENGINE, timeout_seconds=120.0)
    app = build_app(cfg)
    with TestClient(app) as c:
        yield c


def fixture_texts(name):
    return {
        "rules": (DATA / f"{name}_rules.lp").read_text(),
        "task": (DATA / f"{name}_task.json").read_text(),
    }


def create(client, name):
    response = client.post("/sessions", json=fixture_texts(name))
    assert response.status_code == 200, response.text
    return response.json()["id"]


def test_create_and_encoding_roundtrip(client):
    sid = create(client, "chain")
    encoding = client.get(f"/sessions/{sid}/encoding").json()
    from abductor.encode import compile_task
    from conftest import load_fixture

    program = compile_task(load_fixture("chain"))
    assert encoding["text"] == program.text
    assert encoding["variant"] == "semi-res" and encoding["maxAbLvl"] == 5

    summary = client.get(f"/sessions/{sid}").json()
    assert summary["query"] == "relA(john)" and summary["history"] == []


def test_create_rejects_bad_input(client):
    bad_rules = client.post("/sessions", json={"rules": "p(X):-q(f(X)).", "task": '{"query":"p","depth":0}'})
    assert bad_rules.status_code == 400
    assert "function symbol" in str(bad_rules.json()["detail"])

    texts = fixture_texts("mutual")
    bad_task = client.post("/sessions", json={"rules": texts["rules"], "task": '{"query":"relA(X)","depth":-1}'})
    assert bad_task.status_code == 400

    exp_exist = client.post(
        "/sessions",
        json={"rules": "a(X):-b(X,Y).", "task": '{"query":"a(john)","depth":1,"variant":"exp"}'},
    )
    assert exp_exist.status_code == 400
    assert "existential" in str(exp_exist.json()["detail"])


def test_unknown_session_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.post("/sessions/nope/solve").status_code == 404


def test_solve_and_fact_loop_with_diff(client):
    sid = create(client, "naf_pair")
    bundle = client.post(f"/sessions/{sid}/solve").json()
    assert bundle["status"] == "optimumFound"
    assert bundle["abduced"] == ["relB(v1,v2)", "relD(v2)", "relF(v2)"]
    assert bundle["cost"] == 3

    added = client.post(f"/sessions/{sid}/facts", json={"atom": "relB(john,james)"}).json()
    assert added["abduced"] == ["relD(james)", "relF(james)"]
    assert added["diff"] == {
        "entered": ["relD(james)", "relF(james)"],
        "left": ["relB(v1,v2)", "relD(v2)", "relF(v2)"],
    }

    removed = client.request(
        "DELETE", f"/sessions/{sid}/facts", json={"atom": "relB(john,james)"}
    ).json()
    assert removed["abduced"] == ["relB(v1,v2)", "relD(v2)", "relF(v2)"]

    history = client.get(f"/sessions/{sid}").json()["history"]
    actions = [h["action"] for h in history]
    assert actions == ["solve", "add_fact relB(john,james)", "remove_fact relB(john,james)"]


def test_fact_validation_errors(client):
    sid = create(client, "naf_pair")
    non_ground = client.post(f"/sessions/{sid}/facts", json={"atom": "relB(X,james)"})
    assert non_ground.status_code == 400
    unparseable = client.post(f"/sessions/{sid}/facts", json={"atom": "relB(("})
    assert unparseable.status_code == 400
    missing = client.request("DELETE", f"/sessions/{sid}/facts", json={"atom": "relD(mary)"})
    assert missing.status_code == 400


def test_alternate_fact_branch(client):
    sid = create(client, "naf_pair")
    added = client.post(f"/sessions/{sid}/facts", json={"atom": "relF(mary)"}).json()
    assert added["abduced"] == ["relB(v1,mary)", "relD(mary)"]


def test_graph_endpoint_formats(client):
    sid = create(client, "graphdemo")
    graph = client.get(f"/sessions/{sid}/graph").json()
    assert len(graph["edges"]) == 6
    assert sum(1 for e in graph["edges"] if e["sign"] == "neg") == 1
    assert {e["from"] for e in graph["edges"] if e["from"] == "userFact"} == {"userFact"}

    dot = client.get(f"/sessions/{sid}/graph?format=dot")
    assert dot.status_code == 200
    assert dot.text.startswith("digraph justification {")
    assert dot.text.count("->") == 6

    assert client.get(f"/sessions/{sid}/graph?format=bogus").status_code == 400


def test_generalize_endpoint(client):
    sid = create(client, "chain")
    result = client.post(f"/sessions/{sid}/generalize", json={}).json()
    assert result["exhausted"] is True
    assert result["generalized"] == ["relC(john,Y)", "relD(john,Y,Z)", "relE(john,Y,Z)"]
    assert [s["added_fact"] for s in result["trace"]] == [None, "relC(john,v1)", "relD(john,v1,v2)"]

    mismatch = create(client, "mutual")
    response = client.post(f"/sessions/{mismatch}/generalize", json={})
    assert response.status_code == 422

    capped = client.post(f"/sessions/{sid}/generalize", json={"maxIters": 1})
    assert capped.status_code == 400


def test_resolve_returns_cached_equal_bundle(client):
    sid = create(client, "mutual")
    first = client.post(f"/sessions/{sid}/solve").json()
    second = client.post(f"/sessions/{sid}/solve").json()
    assert first["all_optimal"] == second["all_optimal"]
    assert first["encoding_digest"] == second["encoding_digest"]


def test_concurrent_mutations_are_serialized(client):
    sid = create(client, "naf_pair")
    facts = ["relB(a1,b1)", "relB(a2,b2)", "relB(a3,b3)"]
    results = []

    def add(fact):
        results.append(client.post(f"/sessions/{sid}/facts", json={"atom": fact}).status_code)

    threads = [threading.Thread(target=add, args=(f,)) for f in facts]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == [200, 200, 200]
    history = client.get(f"/sessions/{sid}").json()["history"]
    assert sum(1 for h in history if h["action"].startswith("add_fact")) == 3


def test_state_dir_persistence(tmp_path):
    cfg = SolverConfig(executable=ENGINE, timeout_seconds=120.0)
    with TestClient(build_app(cfg, state_dir=str(tmp_path))) as client:
        sid = create(client, "chain")
        client.post(f"/sessions/{sid}/facts", json={"atom": "relC(john,james)"})
    with TestClient(build_app(cfg, state_dir=str(tmp_path))) as revived:
        summary = revived.get(f"/sessions/{sid}")
        assert summary.status_code == 200
        assert summary.json()["facts"]["dynamic"] == ["relC(john,james)"]


def test_solver_failure_maps_to_502():
    cfg = SolverConfig(executable="/no/such/solver", timeout_seconds=5)
    with TestClient(build_app(cfg)) as broken:
        sid = create(broken, "mutual")
        response = broken.post(f"/sessions/{sid}/solve")
        assert response.status_code == 502
        assert response.json()["detail"]["status"] == "solverError"
