"""Classification of raw prover REPL responses into compile verdicts.

Pure functions only: everything here is testable against recorded response
fixtures with no prover installed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

SORRY_WARNING_MARKER = "declaration uses 'sorry'"


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


class CompileKind(str, enum.Enum):
    STATEMENT_PASS = "statement_pass"
    PROOF_PASS = "proof_pass"
    ERROR = "error"
    TIMEOUT = "timeout"
    WORKER_CRASH = "worker_crash"


@dataclass(frozen=True, slots=True)
class Message:
    severity: Severity
    text: str
    position: tuple[int, int] | None = None  # (line, column)

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "text": self.text,
            "position": list(self.position) if self.position else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Message":
        pos = d.get("position")
        return cls(
            severity=Severity(d["severity"]),
            text=d["text"],
            position=(pos[0], pos[1]) if pos else None,
        )

    @property
    def is_sorry_warning(self) -> bool:
        return self.severity is Severity.WARNING and SORRY_WARNING_MARKER in self.text


@dataclass(frozen=True, slots=True)
class CompileVerdict:
    kind: CompileKind
    messages: tuple[Message, ...] = field(default_factory=tuple)
    elapsed_ms: int = 0
    env_tag: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "messages": [m.to_dict() for m in self.messages],
            "elapsed_ms": self.elapsed_ms,
            "env_tag": self.env_tag,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CompileVerdict":
        return cls(
            kind=CompileKind(d["kind"]),
            messages=tuple(Message.from_dict(m) for m in d.get("messages", [])),
            elapsed_ms=d.get("elapsed_ms", 0),
            env_tag=d.get("env_tag", ""),
        )


def parse_wire_messages(raw_messages: list[dict]) -> tuple[Message, ...]:
    """Decode the REPL wire format's message objects.

    The wire shape is {"severity": ..., "data": ..., "pos": {"line": L, "column": C}};
    unknown severities degrade to info.
    """
    out = []
    for m in raw_messages:
        sev_text = m.get("severity", "info")
        try:
            sev = Severity(sev_text)
        except ValueError:
            sev = Severity.INFO
        pos = m.get("pos") or {}
        position = (pos["line"], pos["column"]) if "line" in pos and "column" in pos else None
        out.append(Message(severity=sev, text=m.get("data", ""), position=position))
    return tuple(out)


def classify_response(
    messages: tuple[Message, ...] | list[Message],
    had_timeout: bool,
    expects_proof: bool,
) -> CompileKind:
    """Deterministic mapping from prover diagnostics to a verdict kind.

    A statement-level pass permits exactly the 'declaration uses sorry'
    warning and no errors; a proof pass permits neither errors nor sorry
    warnings. A proof attempt that still carries a sorry warning degrades to
    a statement-level pass.
    """
    if had_timeout:
        return CompileKind.TIMEOUT
    errors = [m for m in messages if m.severity is Severity.ERROR]
    if errors:
        return CompileKind.ERROR
    sorry_warnings = [m for m in messages if m.is_sorry_warning]
    other_warnings = [
        m for m in messages if m.severity is Severity.WARNING and not m.is_sorry_warning
    ]
    if expects_proof:
        if not sorry_warnings:
            return CompileKind.PROOF_PASS
        return CompileKind.STATEMENT_PASS
    if other_warnings:
        # stricter than the prover: unexpected warnings disqualify a pass
        return CompileKind.ERROR
    return CompileKind.STATEMENT_PASS
