"""Header-level Lean 4 statement tooling: parse, normalize, lint, fix, fingerprint.

This is deliberately not a full Lean parser. It understands brackets, the
top-level ``:`` and ``:=``, unicode operators, and identifiers; elaboration
belongs to the prover, which the pipeline invokes anyway.
"""

from mathforge.statement.parser import (
    Binder,
    BinderKind,
    ParsedTheorem,
    Terminator,
    parse_statement,
    normalize_statement,
    serialize,
)
from mathforge.statement.lint import (
    Finding,
    FindingSeverity,
    LintReport,
    lint,
    apply_fixes,
    FIXABLE_RULES,
    FLAG_RULES,
)
from mathforge.statement.fingerprint import canonical_fingerprint

__all__ = [
    "Binder",
    "BinderKind",
    "ParsedTheorem",
    "Terminator",
    "parse_statement",
    "normalize_statement",
    "serialize",
    "Finding",
    "FindingSeverity",
    "LintReport",
    "lint",
    "apply_fixes",
    "FIXABLE_RULES",
    "FLAG_RULES",
    "canonical_fingerprint",
]
