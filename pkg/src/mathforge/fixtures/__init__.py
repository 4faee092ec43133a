"""Shipped fixture data: metric rows, false-pattern golden pairs, corpora."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("mathforge.fixtures") / name))


def load_json(name: str):
    return json.loads(fixture_path(name).read_text(encoding="utf-8"))


def load_accuracy_rows() -> list[tuple[str, int, int, int]]:
    """Per-tag sampled-accuracy rows from the final-round review."""
    return [
        (r["tag"], r["count"], r["sampled_correct"], r["sampled_total"])
        for r in load_json("sampled_accuracy_rows.json")
    ]


def load_false_patterns() -> list[dict]:
    """The cataloged false-translation patterns with wrong/modified pairs."""
    return load_json("false_patterns.json")


def load_verdict_table(path: Path | str | None = None) -> list[dict]:
    """Aggregated compile/NLI verdict counts for the final-round funnel."""
    p = Path(path) if path else fixture_path("funnel_verdict_table.jsonl")
    rows = []
    for line in p.read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows


def load_repl_response_fixtures() -> list[dict]:
    return load_json("repl_response_fixtures.json")


def load_corpus_statements() -> list[str]:
    text = fixture_path("corpus_statements.txt").read_text(encoding="utf-8")
    return [s.strip() for s in text.split("\n---\n") if s.strip()]


def load_imo1983_p5() -> str:
    return fixture_path("imo1983_p5.lean").read_text(encoding="utf-8")
