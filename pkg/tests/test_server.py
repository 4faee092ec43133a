from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from mathforge.core.store import Store
from mathforge.core.types import (
    Problem,
    RoundManifest,
    TranslationCandidate,
    Verdict,
)
from mathforge.errors import PoolSaturatedError
from mathforge.repl.verdict import CompileKind, CompileVerdict, Message, Severity
from mathforge.server.app import create_app
from mathforge.statement.fingerprint import canonical_fingerprint
from mathforge.statement.lint import lint
from mathforge.statement.parser import normalize_statement, parse_statement

CHAINED = "theorem chained (a b c : ℝ) (h : a >= b >= c > 0) : a > 0 := by sorry"
FIXED = "theorem chained (a b c : ℝ) (h : a >= b ∧ b >= c ∧ c > 0) : a > 0 := by sorry"


def _seed_store(root, fake_pool) -> Store:
    store = Store(root, writer=True)
    texts = {
        "r1": CHAINED,  # compile fail, needs the modified fix
        "r2": "theorem ok_but_off (x : ℕ) : x = x := by sorry",  # NLI negative
        "r3": "theorem also_off (y : ℕ) : y = y := by sorry",
        "r4": "theorem broken (FAKE_ERROR : ℕ) : 0 = 1 := by sorry",
        "r5": "theorem odd_goal (z : ℕ) : z + 0 = z := by sorry",
    }
    for pid, text in texts.items():
        store.append_problem(
            Problem(id=pid, source="post", nl_text=f"Problem {pid}.", tags=["inequality"])
        )
        verdict = fake_pool.check_statement(
            normalize_statement(parse_statement(text))
        ) if "FAKE_ERROR" not in text and pid != "r1" else CompileVerdict(
            kind=CompileKind.ERROR,
            messages=(Message(Severity.ERROR, "elaboration failed"),),
            env_tag="fake-prover",
        )
        store.append_candidate(
            TranslationCandidate(
                problem_id=pid,
                round=1,
                sample_index=0,
                statement_text=text,
                lint=lint(text),
                compile=verdict,
                nli=Verdict.NEGATIVE if verdict.kind is CompileKind.STATEMENT_PASS else Verdict.INDETERMINATE,
                back_translation="restated" if verdict.kind is CompileKind.STATEMENT_PASS else None,
                fingerprint=canonical_fingerprint(text),
            )
        )
    store.write_manifest(
        RoundManifest(round=1, model_id="fake", translated_count=5, cpn=3, npn=0)
    )
    return store


@pytest.fixture
def server_world(tmp_path, fake_pool):
    store = _seed_store(tmp_path / "store", fake_pool)

    def checker(text: str):
        return fake_pool.check_statement(normalize_statement(parse_statement(text)))

    app = create_app(store, checker, round_no=1)
    client = TestClient(app)
    yield store, checker, client
    store.close()


def test_queue_returns_all_pending(server_world):
    _, _, client = server_world
    response = client.get("/api/queue", params={"round": 1})
    assert response.status_code == 200
    items = response.json()
    assert len(items) == 5  # every candidate fails compile or NLI here
    first = items[0]
    assert set(first) == {"candidate", "problem", "lint", "compile", "back_translation", "nli"}


def test_queue_unknown_round_is_error(server_world):
    _, _, client = server_world
    response = client.get("/api/queue", params={"round": 9})
    assert response.status_code == 404
    assert response.json()["code"] == "unknown_round"


def test_check_endpoint_is_pure(server_world):
    store, _, client = server_world
    before = (store.root / "labels.jsonl").read_bytes() if (store.root / "labels.jsonl").exists() else b""
    response = client.post("/api/check", json={"statement_text": FIXED})
    assert response.status_code == 200
    assert response.json()["kind"] == "statement_pass"
    bad = client.post("/api/check", json={"statement_text": CHAINED})
    assert bad.json()["kind"] == "error"
    after = (store.root / "labels.jsonl").read_bytes() if (store.root / "labels.jsonl").exists() else b""
    assert before == after


def test_check_same_statement_same_verdict(server_world):
    _, _, client = server_world
    a = client.post("/api/check", json={"statement_text": FIXED}).json()
    b = client.post("/api/check", json={"statement_text": FIXED}).json()
    assert a["kind"] == b["kind"]


def test_malformed_submission_is_400_with_field_errors(server_world):
    _, _, client = server_world
    response = client.post("/api/verdict", json={"verdict": "correct"})
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "malformed_request"
    assert any(d["field"].endswith("candidate_id") for d in body["details"])

    missing_text = client.post(
        "/api/verdict", json={"candidate_id": "r1/1/0", "verdict": "modified"}
    )
    assert missing_text.status_code == 400


def test_modified_verdict_recompiles_and_persists(server_world):
    store, checker, client = server_world
    response = client.post(
        "/api/verdict",
        json={"candidate_id": "r1/1/0", "verdict": "modified", "modified_text": FIXED},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["ok"] is True
    assert body["remaining"] == 4

    # restart: rebuild the app over a fresh Store on the same directory
    store2 = Store(store.root)
    app2 = create_app(store2, checker, round_no=1)
    client2 = TestClient(app2)
    queue = client2.get("/api/queue", params={"round": 1}).json()
    assert len(queue) == 4
    assert all(item["candidate"]["problem_id"] != "r1" for item in queue)


def test_modified_verdict_failing_edit_is_422_with_diagnostics(server_world):
    _, _, client = server_world
    response = client.post(
        "/api/verdict",
        json={
            "candidate_id": "r4/1/0",
            "verdict": "modified",
            "modified_text": "theorem broken (FAKE_ERROR : ℕ) : 0 = 2 := by sorry",
        },
    )
    assert response.status_code == 422
    assert "recompile" in response.json()["message"]


def test_unknown_candidate_is_404(server_world):
    _, _, client = server_world
    response = client.post(
        "/api/verdict", json={"candidate_id": "ghost/1/0", "verdict": "correct"}
    )
    assert response.status_code == 404


def test_stats_tracks_reviews(server_world):
    _, _, client = server_world
    empty = client.get("/api/stats", params={"round": 1}).json()
    assert empty["weighted_accuracy"] is None
    assert empty["rows"] == []

    client.post("/api/verdict", json={"candidate_id": "r2/1/0", "verdict": "correct"})
    client.post("/api/verdict", json={"candidate_id": "r3/1/0", "verdict": "rejected"})
    stats = client.get("/api/stats", params={"round": 1}).json()
    (row,) = stats["rows"]
    tag, count, correct, total = row
    assert tag == "inequality"
    assert (correct, total) == (1, 2)
    assert stats["weighted_accuracy"] == 0.5
    assert stats["manifest"]["human_labels_added"] == 1


def test_pool_saturation_maps_to_503(tmp_path, fake_pool):
    store = _seed_store(tmp_path / "store", fake_pool)

    def saturated(_text: str):
        raise PoolSaturatedError("full")

    client = TestClient(create_app(store, saturated, round_no=1))
    response = client.post("/api/check", json={"statement_text": FIXED})
    assert response.status_code == 503
    assert response.headers["retry-after"] == "2"
    store.close()
