"""Prompt registry, chat-completion backends, and response parsers."""

from mathforge.gateway.prompts import PROMPTS, PromptTemplate, registry_digest
from mathforge.gateway.backends import (
    Backend,
    CappedBackend,
    MockBackend,
    RemoteBackend,
    ScriptedBackend,
    with_retries,
)
from mathforge.gateway.parsers import parse_bold_verdict, parse_extraction_json
from mathforge.gateway.ops import (
    ProblemDraft,
    TriVerdict,
    back_translate,
    extract_problems,
    judge_nli,
    judge_well_defined,
    translate,
)

__all__ = [
    "PROMPTS",
    "PromptTemplate",
    "registry_digest",
    "Backend",
    "CappedBackend",
    "MockBackend",
    "RemoteBackend",
    "ScriptedBackend",
    "with_retries",
    "parse_bold_verdict",
    "parse_extraction_json",
    "ProblemDraft",
    "TriVerdict",
    "back_translate",
    "extract_problems",
    "judge_nli",
    "judge_well_defined",
    "translate",
]
