from __future__ import annotations

from mathforge.fixtures import load_repl_response_fixtures
from mathforge.repl.verdict import (
    CompileKind,
    CompileVerdict,
    Message,
    Severity,
    classify_response,
    parse_wire_messages,
)


def _classify(case: dict) -> CompileKind:
    messages = parse_wire_messages((case["response"] or {}).get("messages", []))
    return classify_response(messages, case["had_timeout"], case["expects_proof"])


def test_recorded_fixtures_classify_as_expected():
    cases = load_repl_response_fixtures()
    assert len(cases) >= 20
    for case in cases:
        assert _classify(case) is CompileKind(case["expected_kind"]), case["name"]


def test_classification_is_deterministic_across_replays():
    cases = load_repl_response_fixtures()
    first = [_classify(c) for c in cases]
    second = [_classify(c) for c in cases]
    assert first == second


def test_sorry_warning_statement_pass():
    messages = (Message(Severity.WARNING, "declaration uses 'sorry'"),)
    assert classify_response(messages, False, False) is CompileKind.STATEMENT_PASS


def test_empty_messages_proof_pass():
    assert classify_response((), False, True) is CompileKind.PROOF_PASS


def test_error_wins_over_sorry_warning():
    messages = (
        Message(Severity.WARNING, "declaration uses 'sorry'"),
        Message(Severity.ERROR, "unknown identifier 'sqrt'"),
    )
    assert classify_response(messages, False, False) is CompileKind.ERROR


def test_proof_with_sorry_is_statement_level_only():
    messages = (Message(Severity.WARNING, "declaration uses 'sorry'"),)
    assert classify_response(messages, False, True) is CompileKind.STATEMENT_PASS


def test_timeout_dominates():
    messages = (Message(Severity.ERROR, "whatever"),)
    assert classify_response(messages, True, False) is CompileKind.TIMEOUT


def test_verdict_serialization_round_trip():
    verdict = CompileVerdict(
        kind=CompileKind.ERROR,
        messages=(Message(Severity.ERROR, "boom", (3, 14)),),
        elapsed_ms=250,
        env_tag="fake",
    )
    assert CompileVerdict.from_dict(verdict.to_dict()) == verdict
