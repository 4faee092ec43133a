"""Dataset export formats.

Training pairs are emitted in both directions with fixed prompt ids: one
``nl2fl`` record (natural language in, formal statement out) and one ``fl2nl``
record per accepted candidate. Statements always end with ':= by sorry'.

The first line of every export file is a header record naming the format, so
an empty export is still a valid, identifiable file.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

from mathforge.core.journal import encode_record
from mathforge.core.types import Problem, TranslationCandidate
from mathforge.errors import ParseError, ValidationError
from mathforge.statement.parser import normalize_statement, parse_statement

TRAINING_PAIRS_FORMAT = "training_pairs@1"
DATASET_FORMAT = "dataset@1"


def export_training_pairs(
    accepted: Sequence[TranslationCandidate],
    problems_by_id: Mapping[str, Problem],
    path: Path | str,
) -> int:
    """Write two-direction training records for human-accepted candidates.

    Returns the number of records written (two per candidate). Candidates that
    are not accepted (correct or modified) are rejected up front, listing ids.
    """
    not_accepted = [c.key for c in accepted if c.accepted_text is None]
    if not_accepted:
        raise ValidationError(
            "candidates not human-accepted: " + ", ".join(sorted(not_accepted))
        )
    lines = [encode_record({"format": TRAINING_PAIRS_FORMAT, "count": len(accepted) * 2})]
    for cand in accepted:
        problem = problems_by_id.get(cand.problem_id)
        if problem is None:
            raise ValidationError(f"no problem {cand.problem_id} for candidate {cand.key}")
        statement = _ensure_sorry_terminator(cand.accepted_text)
        lines.append(
            encode_record({"prompt_id": "nl2fl", "input": problem.nl_text, "target": statement})
        )
        lines.append(
            encode_record({"prompt_id": "fl2nl", "input": statement, "target": problem.nl_text})
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(lines) - 1


def _ensure_sorry_terminator(statement: str) -> str:
    text = statement.strip()
    if text.endswith(":= by sorry"):
        return text
    try:
        return normalize_statement(parse_statement(text))
    except ParseError as exc:
        raise ValidationError(f"statement cannot be normalized for export: {exc}") from exc


def export_dataset(
    candidates: Sequence[TranslationCandidate],
    problems_by_id: Mapping[str, Problem],
    path: Path | str,
    proofs: Mapping[str, str] | None = None,
) -> int:
    """Write the final statement dataset: NLI-passing candidates joined to problems."""
    lines = [encode_record({"format": DATASET_FORMAT})]
    count = 0
    for cand in candidates:
        if not cand.nli_passed:
            continue
        problem = problems_by_id.get(cand.problem_id)
        if problem is None:
            continue
        record = {
            "id": cand.key,
            "problem_id": cand.problem_id,
            "nl_text": problem.nl_text,
            "answer": problem.answer or "",
            "tags": list(problem.tags),
            "statement_text": cand.statement_text,
            "fingerprint": cand.fingerprint,
            "round": cand.round,
        }
        if proofs and cand.key in proofs:
            record["proof"] = proofs[cand.key]
        lines.append(encode_record(record))
        count += 1
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return count
