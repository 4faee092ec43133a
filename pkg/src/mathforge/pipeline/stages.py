"""Early filter stages: tag allowlist and gold-answer rephrasing."""

from __future__ import annotations

from dataclasses import dataclass, replace

from mathforge.core.types import Problem, normalize_tag
from mathforge.errors import ValidationError

DEFAULT_ALLOWED_TAGS = frozenset(
    {
        "inequality",
        "number_theory",
        "trigonometry",
        "modular_arithmetic",
        "induction",
        "functional_equation",
        "complex_numbers",
        "polynomial",
    }
)


@dataclass(frozen=True)
class TagAllowlist:
    tags: frozenset[str] = DEFAULT_ALLOWED_TAGS

    def __post_init__(self) -> None:
        if not self.tags:
            raise ValidationError("tag allowlist must be non-empty")
        normalized = frozenset(normalize_tag(t) for t in self.tags)
        object.__setattr__(self, "tags", normalized)

    def __contains__(self, tag: str) -> bool:
        return normalize_tag(tag) in self.tags


DEFAULT_ALLOWLIST = TagAllowlist()


def filter_by_tags(problems: list[Problem], allowlist: TagAllowlist | None = None) -> list[Problem]:
    """Keep problems whose tags intersect the allowlist."""
    allow = allowlist or DEFAULT_ALLOWLIST
    return [p for p in problems if any(t in allow.tags for t in p.tags)]


_REPHRASE_TEMPLATE = "Show that it is {answer}."


def rephrase_answer(problem: Problem) -> Problem:
    """Append exactly one 'Show that it is {answer}.' sentence for answer problems.

    Proof problems (no answer) pass through unchanged; already-rephrased text
    is not appended again.
    """
    if not problem.answer:
        return problem
    sentence = _REPHRASE_TEMPLATE.format(answer=problem.answer)
    text = problem.nl_text.rstrip()
    if text.endswith(sentence):
        return problem
    return replace(problem, nl_text=f"{text} {sentence}")
