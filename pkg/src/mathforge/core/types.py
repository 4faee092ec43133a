"""Domain types carried through every pipeline stage."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction

from mathforge.errors import ValidationError
from mathforge.repl.verdict import CompileKind, CompileVerdict
from mathforge.statement.fingerprint import canonical_fingerprint
from mathforge.statement.lint import LintReport

_WHITESPACE_RUN = re.compile(r"\s+")


def normalize_tag(tag: str) -> str:
    """Lowercase with internal whitespace replaced by underscore."""
    return _WHITESPACE_RUN.sub("_", tag.strip().lower())


class WellDefined(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNJUDGED = "unjudged"


class Verdict(str, enum.Enum):
    """Tri-state model verdict (NLI agreement, well-definedness judging)."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    INDETERMINATE = "indeterminate"


class HumanVerdict(str, enum.Enum):
    UNREVIEWED = "unreviewed"
    CORRECT = "correct"
    MODIFIED = "modified"
    REJECTED = "rejected"


@dataclass(slots=True)
class Problem:
    """A natural-language math problem with tags and an optional gold answer."""

    id: str
    source: str
    nl_text: str
    answer: str | None = None
    tags: list[str] = field(default_factory=list)
    well_defined: WellDefined = WellDefined.UNJUDGED

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("problem id must be non-empty")
        if self.answer is not None:
            self.answer = self.answer.strip() or None
        self.tags = [normalize_tag(t) for t in self.tags if t.strip()]
        self.well_defined = WellDefined(self.well_defined)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "nl_text": self.nl_text,
            "answer": self.answer or "",
            "tags": list(self.tags),
            "well_defined": self.well_defined.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Problem":
        return cls(
            id=d["id"],
            source=d["source"],
            nl_text=d["nl_text"],
            answer=d.get("answer") or None,
            tags=list(d.get("tags", [])),
            well_defined=WellDefined(d.get("well_defined", "unjudged")),
        )


def candidate_key(problem_id: str, round_no: int, sample_index: int) -> str:
    """Stable identifier for one translation attempt."""
    return f"{problem_id}/{round_no}/{sample_index}"


@dataclass(slots=True)
class TranslationCandidate:
    """One formal-statement attempt with its full verdict chain."""

    problem_id: str
    round: int
    sample_index: int
    statement_text: str
    lint: LintReport = field(default_factory=LintReport)
    compile: CompileVerdict | None = None
    back_translation: str | None = None
    nli: Verdict = Verdict.INDETERMINATE
    human: HumanVerdict = HumanVerdict.UNREVIEWED
    modified_text: str | None = None
    fingerprint: str = ""

    def __post_init__(self) -> None:
        if self.round < 0 or self.sample_index < 0:
            raise ValidationError("round and sample_index must be non-negative")
        self.nli = Verdict(self.nli)
        self.human = HumanVerdict(self.human)
        if self.nli is Verdict.POSITIVE and not self.compiles:
            raise ValidationError(
                f"candidate {self.key}: NLI positive requires a statement-level compile pass"
            )
        if self.human is HumanVerdict.MODIFIED:
            if not self.modified_text or self.modified_text == self.statement_text:
                raise ValidationError(
                    f"candidate {self.key}: modified verdict requires a distinct modified_text"
                )

    @property
    def key(self) -> str:
        return candidate_key(self.problem_id, self.round, self.sample_index)

    @property
    def compiles(self) -> bool:
        return self.compile is not None and self.compile.kind is CompileKind.STATEMENT_PASS

    @property
    def nli_passed(self) -> bool:
        return self.compiles and self.nli is Verdict.POSITIVE

    @property
    def accepted_text(self) -> str | None:
        """Training-eligible statement text, if any."""
        if self.human is HumanVerdict.CORRECT:
            return self.statement_text
        if self.human is HumanVerdict.MODIFIED:
            return self.modified_text
        return None

    @classmethod
    def create(cls, problem_id: str, round_no: int, sample_index: int, statement_text: str, **kw):
        """Build a candidate with its fingerprint computed from the statement."""
        return cls(
            problem_id=problem_id,
            round=round_no,
            sample_index=sample_index,
            statement_text=statement_text,
            fingerprint=canonical_fingerprint(statement_text),
            **kw,
        )

    def with_human(self, verdict: HumanVerdict, modified_text: str | None = None):
        return replace(self, human=verdict, modified_text=modified_text)

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "round": self.round,
            "sample_index": self.sample_index,
            "statement_text": self.statement_text,
            "lint": self.lint.to_dict(),
            "compile": self.compile.to_dict() if self.compile else None,
            "back_translation": self.back_translation,
            "nli": self.nli.value,
            "human": self.human.value,
            "modified_text": self.modified_text,
            "fingerprint": self.fingerprint,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TranslationCandidate":
        return cls(
            problem_id=d["problem_id"],
            round=d["round"],
            sample_index=d["sample_index"],
            statement_text=d["statement_text"],
            lint=LintReport.from_dict(d.get("lint") or {}),
            compile=CompileVerdict.from_dict(d["compile"]) if d.get("compile") else None,
            back_translation=d.get("back_translation"),
            nli=Verdict(d.get("nli", "indeterminate")),
            human=HumanVerdict(d.get("human", "unreviewed")),
            modified_text=d.get("modified_text"),
            fingerprint=d.get("fingerprint", ""),
        )


@dataclass(slots=True)
class RoundManifest:
    """Per-iteration bookkeeping: counts, CPN, NPN, labels, config digest."""

    round: int
    model_id: str = ""
    translated_count: int = 0
    cpn: int = 0
    npn: int = 0
    per_tag_counts: dict[str, int] = field(default_factory=dict)
    human_labels_added: int = 0
    config_digest: str = ""

    def __post_init__(self) -> None:
        if not (0 <= self.npn <= self.cpn <= self.translated_count):
            raise ValidationError(
                f"manifest counts must satisfy npn <= cpn <= translated "
                f"(got {self.npn} / {self.cpn} / {self.translated_count})"
            )
        for tag, count in self.per_tag_counts.items():
            if count < 0 or count > self.npn:
                raise ValidationError(f"per-tag count for {tag!r} outside [0, npn]")

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "model_id": self.model_id,
            "translated_count": self.translated_count,
            "cpn": self.cpn,
            "npn": self.npn,
            "per_tag_counts": dict(sorted(self.per_tag_counts.items())),
            "human_labels_added": self.human_labels_added,
            "config_digest": self.config_digest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RoundManifest":
        return cls(
            round=d["round"],
            model_id=d.get("model_id", ""),
            translated_count=d.get("translated_count", 0),
            cpn=d.get("cpn", 0),
            npn=d.get("npn", 0),
            per_tag_counts=dict(d.get("per_tag_counts", {})),
            human_labels_added=d.get("human_labels_added", 0),
            config_digest=d.get("config_digest", ""),
        )


@dataclass(frozen=True, slots=True)
class SamplingConfig:
    """Per-round sampling knobs: translations per problem, proof attempts, timeouts."""

    n_samples: int = 1
    temperature: float = 0.0
    proof_k: int = 0
    timeout_s: float = 60.0

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValidationError("n_samples must be >= 1")
        if not (0.0 <= self.temperature <= 2.0):
            raise ValidationError("temperature must be in [0, 2]")
        if self.proof_k < 0:
            raise ValidationError("proof_k must be >= 0")
        if self.timeout_s <= 0:
            raise ValidationError("timeout_s must be > 0")

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "temperature": self.temperature,
            "proof_k": self.proof_k,
            "timeout_s": self.timeout_s,
        }


@dataclass(frozen=True, slots=True)
class PassAtK:
    """Solved/total at k proof samples; rate is exact, rounded only at display."""

    solved: int
    total: int
    k: int
    rate: Fraction

    @property
    def display(self) -> str:
        from mathforge.core.metrics import format_percent

        return format_percent(self.rate)
