import random

import pytest
from fastapi.testclient import TestClient

from fdnf.analyzer import annotate_attempt
from fdnf.service import create_app
from fdnf.solutions import load_solutions


@pytest.fixture()
def client():
    return TestClient(create_app())


def _create(client, formula="X=>Y", mode="RULE", feedback=True, **extra):
    r = client.post(
        "/sessions", json={"formula": formula, "mode": mode, "feedback": feedback, **extra}
    )
    assert r.status_code == 200, r.text
    return r.json()


def test_create_session_state(client):
    state = _create(client)
    assert state["formula"] == "X=>Y"
    assert state["stage"] == "1"
    assert state["phase"] == "Marking"
    assert state["task_vars"] == ["X", "Y"]
    assert state["layout"]["text"] == "X=>Y"


def test_create_rejects_syntax_error(client):
    r = client.post("/sessions", json={"formula": "X&&", "mode": "RULE"})
    assert r.status_code == 400
    assert r.json()["code"] == "SyntaxError"


def test_create_rejects_too_many_variables(client):
    formula = "&".join("ABCDEFGHI")
    r = client.post("/sessions", json={"formula": formula})
    assert r.status_code == 400
    assert r.json()["code"] == "TooManyVariables"


def test_create_generated_task(client):
    from fdnf.formulas import Iff, Imp, Not, parse, print_formula, variables, walk
    from fdnf.tasks import TaskSpec, generate_tasks

    r = client.post("/sessions", json={"generate": {"seed": 7}, "mode": "RULE"})
    assert r.status_code == 200
    state = r.json()
    (expected,) = generate_tasks(TaskSpec(count=1, seed=7))
    assert state["formula"] == print_formula(expected)
    f = parse(state["formula"])
    assert sum(isinstance(n, Imp) for n in walk(f)) == 1
    assert sum(isinstance(n, Iff) for n in walk(f)) == 1
    assert sum(isinstance(n, Not) for n in walk(f)) in (2, 3)
    assert len(variables(f)) >= 3


def test_mark_lists_applicable_rules(client):
    state = _create(client, "!X&Y|Z")
    r = client.post(f"/sessions/{state['id']}/mark", json={"path": [0]})
    assert r.status_code == 200
    body = r.json()
    ids = [e["rule"] for e in body["applicable"]]
    assert 17 in ids and 9 not in ids
    assert body["state"]["phase"] == "Replacing"


def test_mark_out_of_range_rejected(client):
    state = _create(client)
    r = client.post(f"/sessions/{state['id']}/mark", json={"path": [5]})
    assert r.status_code == 400
    assert r.json()["code"] == "InvalidPath"
    assert client.get(f"/sessions/{state['id']}").json()["marked"] is None


def test_mark_root_is_legal(client):
    state = _create(client)
    r = client.post(f"/sessions/{state['id']}/mark", json={"path": []})
    assert r.status_code == 200


def test_apply_rule_flow(client):
    state = _create(client, "!(X&Y)|Z")
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": [0]})
    r = client.post(f"/sessions/{sid}/apply", json={"rule": 9})
    assert r.status_code == 200
    body = r.json()
    assert body["state"]["formula"] == "!X|!Y|Z"
    assert body["verdict"]["ok"] is True
    assert body["verdict"]["stage"] == "2"
    assert body["state"]["marked"] is None


def test_apply_inapplicable_rule_leaves_no_trace(client):
    state = _create(client, "(X|Y)&Z")
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    r = client.post(f"/sessions/{sid}/apply", json={"rule": 9})
    assert r.status_code == 400
    assert r.json()["code"] == "NotApplicable"
    assert client.get(f"/sessions/{sid}").json()["steps"] == []


def test_apply_requires_mark(client):
    state = _create(client)
    r = client.post(f"/sessions/{state['id']}/apply", json={"rule": 3})
    assert r.status_code == 400
    assert r.json()["code"] == "NoMark"


def test_apply_wrong_mode(client):
    state = _create(client, mode="INPUT")
    client.post(f"/sessions/{state['id']}/mark", json={"path": []})
    r = client.post(f"/sessions/{state['id']}/apply", json={"rule": 3})
    assert r.status_code == 400
    assert r.json()["code"] == "WrongMode"


def test_input_flow_checks_equivalence(client):
    state = _create(client, mode="INPUT")
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    r = client.post(f"/sessions/{sid}/input", json={"formula": "X|Y"})
    assert r.status_code == 400
    assert r.json()["code"] == "NotEquivalent"
    assert client.get(f"/sessions/{sid}").json()["formula"] == "X=>Y"
    # equivalent replacement goes through
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    r = client.post(f"/sessions/{sid}/input", json={"formula": "!X|Y"})
    assert r.status_code == 200
    assert r.json()["state"]["formula"] == "!X|Y"


def test_input_syntax_error(client):
    state = _create(client, mode="INPUT")
    client.post(f"/sessions/{state['id']}/mark", json={"path": []})
    r = client.post(f"/sessions/{state['id']}/input", json={"formula": "X=>"})
    assert r.status_code == 400
    assert r.json()["code"] == "SyntaxError"


def test_relevance_error_is_recorded_not_blocked(client):
    state = _create(client, "Y|X")
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    r = client.post(f"/sessions/{sid}/apply", json={"rule": 18})
    assert r.status_code == 200
    body = r.json()
    assert body["verdict"]["ok"] is False
    assert body["verdict"]["error"] == "E12"
    assert len(body["state"]["steps"]) == 1


def test_no_feedback_mode_hides_verdicts(client):
    state = _create(client, "Y|X", feedback=False)
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    r = client.post(f"/sessions/{sid}/apply", json={"rule": 18})
    assert r.status_code == 200
    assert r.json()["verdict"] is None
    assert r.json()["state"]["steps"][0]["verdict"] is None


def test_undo_flow(client):
    state = _create(client)
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    client.post(f"/sessions/{sid}/apply", json={"rule": 3})
    r = client.post(f"/sessions/{sid}/undo")
    assert r.status_code == 200
    assert r.json()["state"]["formula"] == "X=>Y"
    assert [s["op"] for s in r.json()["state"]["steps"]] == ["apply", "undo"]


def test_undo_empty_session(client):
    state = _create(client)
    r = client.post(f"/sessions/{state['id']}/undo")
    assert r.status_code == 400
    assert r.json()["code"] == "NothingToUndo"


def test_two_applies_one_undo(client):
    state = _create(client, "!(X&Y)")
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    client.post(f"/sessions/{sid}/apply", json={"rule": 9})  # !X|!Y
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    client.post(f"/sessions/{sid}/apply", json={"rule": 11})  # back to !(X&Y)
    r = client.post(f"/sessions/{sid}/undo")
    assert r.json()["state"]["formula"] == "!X|!Y"


def test_export_roundtrip(client):
    state = _create(client, "X=>Y", task_id="t9", student="s2")
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    client.post(f"/sessions/{sid}/apply", json={"rule": 3})
    client.post(f"/sessions/{sid}/undo")
    r = client.get(f"/sessions/{sid}/export")
    assert r.status_code == 200
    loaded = load_solutions(r.content)
    (att,) = loaded.attempts
    assert att.task_id == "t9" and att.student == "s2"
    assert [s.op for s in att.steps] == ["apply", "undo"]


def test_export_empty_session(client):
    state = _create(client)
    r = client.get(f"/sessions/{state['id']}/export")
    (att,) = load_solutions(r.content).attempts
    assert att.steps == ()


def test_exported_attempt_replays_to_session_state(client):
    state = _create(client, "!(X=>Y)")
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    live = client.post(f"/sessions/{sid}/apply", json={"rule": 7}).json()
    att = load_solutions(client.get(f"/sessions/{sid}/export").content).attempts[0]
    anns, summary = annotate_attempt(att)
    assert anns[0].verdict.ok == live["verdict"]["ok"]
    assert summary.completed == live["state"]["completed"]


def test_exported_verdicts_match_live_feedback_multistep(client):
    state = _create(client, "!((X=>Y)&Z)")
    sid = state["id"]
    live_verdicts = []

    def step(path, rule):
        client.post(f"/sessions/{sid}/mark", json={"path": path})
        r = client.post(f"/sessions/{sid}/apply", json={"rule": rule})
        assert r.status_code == 200
        live_verdicts.append((r.json()["verdict"]["ok"], r.json()["verdict"]["error"]))

    step([], 9)        # E4: De Morgan while the implication remains
    client.post(f"/sessions/{sid}/undo")
    live_verdicts.append(None)
    step([0, 0], 3)    # stage-1 elimination of the inner implication, ok
    step([], 9)        # now the outermost negation moves in, ok

    att = load_solutions(client.get(f"/sessions/{sid}/export").content).attempts[0]
    anns, _ = annotate_attempt(att)
    replayed = [
        None if a.kind == "undo" else (a.verdict.ok, a.verdict.error) for a in anns
    ]
    assert replayed == live_verdicts


def test_finished_session_blocks_steps(client):
    state = _create(client, "!(X=>Y)")
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": []})
    r = client.post(f"/sessions/{sid}/apply", json={"rule": 7})
    assert r.json()["state"]["phase"] == "Finished"
    r = client.post(f"/sessions/{sid}/mark", json={"path": []})
    assert r.status_code == 400 and r.json()["code"] == "Finished"
    # undo reopens
    assert client.post(f"/sessions/{sid}/undo").json()["state"]["phase"] == "Marking"


def test_unknown_session_404(client):
    assert client.get("/sessions/nope").status_code == 404


def test_rules_endpoint(client):
    r = client.get("/rules")
    table = r.json()["rules"]
    assert len(table) == 29
    assert table[0] == {
        "id": 1,
        "name": "drop double negation",
        "kind": "simplification",
        "stage": None,
        "params": "none",
    }


def test_slice_mark_and_apply(client):
    state = _create(client, "!X|!Y|Z")
    sid = state["id"]
    r = client.post(f"/sessions/{sid}/mark", json={"path": [], "slice": [0, 2]})
    assert r.status_code == 200
    assert 11 in [e["rule"] for e in r.json()["applicable"]]
    r = client.post(f"/sessions/{sid}/apply", json={"rule": 11})
    assert r.json()["state"]["formula"] == "!(X&Y)|Z"


def test_rule19_params_over_wire(client):
    state = _create(client, "X|Y&X")
    sid = state["id"]
    client.post(f"/sessions/{sid}/mark", json={"path": [0]})
    r = client.post(f"/sessions/{sid}/apply", json={"rule": 19, "params": {"vars": ["Y"]}})
    assert r.status_code == 200
    assert r.json()["state"]["formula"] == "X&Y|X&!Y|Y&X"


def test_random_call_sequences_never_corrupt_state(client):
    rng = random.Random(4)
    state = _create(client, "!((X=>Y)&Z)")
    sid = state["id"]
    for _ in range(120):
        roll = rng.random()
        if roll < 0.35:
            depth = rng.randrange(3)
            path = [rng.randrange(3) for _ in range(depth)]
            client.post(f"/sessions/{sid}/mark", json={"path": path})
        elif roll < 0.7:
            client.post(f"/sessions/{sid}/apply", json={"rule": rng.randrange(1, 30)})
        elif roll < 0.85:
            client.post(f"/sessions/{sid}/undo")
        else:
            client.get(f"/sessions/{sid}/export")
        st = client.get(f"/sessions/{sid}").json()
        assert st["phase"] in ("Marking", "Replacing", "Finished")
        # replaying the history always reproduces the current formula
        att = load_solutions(client.get(f"/sessions/{sid}/export").content).attempts[0]
        stack = []
        for s in att.steps:
            stack.append(s.formula) if s.op == "apply" else stack.pop()
        expected = stack[-1] if stack else att.initial
        assert st["formula"] == expected
