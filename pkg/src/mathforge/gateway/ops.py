"""Gateway operations: extraction, judging, translation, back-translation, NLI."""

from __future__ import annotations

from dataclasses import dataclass

from mathforge.core.types import Problem, normalize_tag
from mathforge.errors import ValidationError
from mathforge.gateway.backends import Backend, with_retries
from mathforge.gateway.parsers import parse_bold_verdict, parse_extraction_json
from mathforge.gateway.prompts import PROMPTS


@dataclass(frozen=True)
class TriVerdict:
    """Model verdict with the full raw response retained for audit."""

    value: str  # positive / negative / indeterminate
    raw: str


@dataclass(frozen=True)
class ProblemDraft:
    """Extraction output before an id is assigned at ingest."""

    nl_text: str
    answer: str | None
    tags: tuple[str, ...]


def extract_problems(
    post_text: str, backend: Backend, *, key: str | None = None, retries: int = 2,
    backoff_s: float = 0.5,
) -> list[ProblemDraft]:
    """Extract problem drafts from one forum post."""
    if not post_text.strip():
        raise ValidationError("post_text must be non-empty")
    prompt = PROMPTS["extract"].render(post=post_text)
    responses = with_retries(
        lambda: backend.complete(prompt, key=key), retries=retries, backoff_s=backoff_s
    )
    drafts = parse_extraction_json(responses[0])
    return [
        ProblemDraft(
            nl_text=d["problem"],
            answer=d["answer"] or None,
            tags=tuple(normalize_tag(t) for t in d["tags"] if t.strip()),
        )
        for d in drafts
    ]


def judge_well_defined(
    problem: Problem, backend: Backend, *, key: str | None = None, retries: int = 2,
    backoff_s: float = 0.5,
) -> TriVerdict:
    """Ask whether the problem is well-defined; last bold marker wins.

    An indeterminate response is retried once, then recorded as indeterminate.
    """
    if not problem.nl_text.strip():
        raise ValidationError("problem.nl_text must be non-empty")
    prompt = PROMPTS["well_defined"].render(problem=problem.nl_text)

    def ask() -> TriVerdict:
        responses = with_retries(
            lambda: backend.complete(prompt, key=key), retries=retries, backoff_s=backoff_s
        )
        raw = responses[0]
        return TriVerdict(parse_bold_verdict(raw, "well-defined", "ill-defined"), raw)

    verdict = ask()
    if verdict.value == "indeterminate":
        verdict = ask()
    return verdict


def translate(
    problem: Problem,
    n: int,
    temperature: float,
    backend: Backend,
    *,
    key: str | None = None,
    retries: int = 2,
    backoff_s: float = 0.5,
) -> list[str]:
    """Sample n raw formal-statement completions (not yet normalized)."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    prompt = PROMPTS["nl2fl"].render(problem=problem.nl_text)
    return with_retries(
        lambda: backend.complete(prompt, n=n, temperature=temperature, key=key),
        retries=retries,
        backoff_s=backoff_s,
    )


def back_translate(
    statement_text: str, backend: Backend, *, key: str | None = None, retries: int = 2,
    backoff_s: float = 0.5,
) -> str:
    """Render a formal statement back into natural language."""
    prompt = PROMPTS["fl2nl"].render(statement=statement_text)
    responses = with_retries(
        lambda: backend.complete(prompt, key=key), retries=retries, backoff_s=backoff_s
    )
    return responses[0].strip()


def judge_nli(
    original_nl: str,
    back_translated_nl: str,
    backend: Backend,
    *,
    key: str | None = None,
    retries: int = 2,
    backoff_s: float = 0.5,
) -> TriVerdict:
    """Judge whether the back-translation means the same problem.

    Positive only when the last bold marker is **same**; anything else routes
    the sample to human revision. Indeterminate responses are retried once.
    """
    if not original_nl.strip() or not back_translated_nl.strip():
        raise ValidationError("both problem texts must be non-empty")
    prompt = PROMPTS["nli"].render(
        original=original_nl, back_translated=back_translated_nl
    )

    def ask() -> TriVerdict:
        responses = with_retries(
            lambda: backend.complete(prompt, key=key), retries=retries, backoff_s=backoff_s
        )
        raw = responses[0]
        return TriVerdict(parse_bold_verdict(raw, "same", "different"), raw)

    verdict = ask()
    if verdict.value == "indeterminate":
        verdict = ask()
    return verdict
