"""Detect and auto-fix the cataloged false-translation patterns.

Four rules are mechanically fixable (span-based rewrites): chained
inequalities, implicit multiplication, integer-division exponents, and
unqualified real functions. Six rules need human or model judgment and only
flag: missing triangle hypotheses, tuple enumerations of solution sets,
solution-count goals, missing extremum witnesses, infinitude shape, and digit
decompositions. Flag rules that compare against the original problem wording
take the natural-language text as an optional second input.

Spans are byte ranges into the UTF-8 encoding of the input.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from mathforge.errors import ParseError, ValidationError
from mathforge.statement.parser import parse_with_spans
from mathforge.statement.tokens import CLOSE_BRACKETS, OPEN_BRACKETS, Token


class FindingSeverity(str, enum.Enum):
    FIXABLE = "fixable"
    FLAG = "flag"


@dataclass(frozen=True)
class Finding:
    rule_id: str
    span: tuple[int, int]
    severity: FindingSeverity
    suggestion: str | None = None

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "span": [self.span[0], self.span[1]],
            "severity": self.severity.value,
            "suggestion": self.suggestion,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Finding":
        return cls(
            rule_id=d["rule_id"],
            span=(d["span"][0], d["span"][1]),
            severity=FindingSeverity(d["severity"]),
            suggestion=d.get("suggestion"),
        )


@dataclass(frozen=True)
class LintReport:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def fixable(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is FindingSeverity.FIXABLE)

    @property
    def clean(self) -> bool:
        return not self.findings

    def rule_ids(self) -> set[str]:
        return {f.rule_id for f in self.findings}

    def to_dict(self) -> dict:
        return {"findings": [f.to_dict() for f in self.findings]}

    @classmethod
    def from_dict(cls, d: dict) -> "LintReport":
        return cls(findings=tuple(Finding.from_dict(f) for f in d.get("findings", [])))


FIXABLE_RULES = (
    "chained_inequality",
    "missing_operator",
    "nat_division",
    "namespace_qualification",
)
FLAG_RULES = (
    "triangle_condition",
    "all_solutions_enumeration",
    "solution_count_set",
    "missing_extremum_witness",
    "infinitude_witness",
    "digit_decomposition",
)

_CHAIN_OPS = frozenset({"<", ">", "<=", ">=", "≤", "≥", "=", "≠"})
_SEGMENT_SEPARATORS = frozenset({",", "∧", "∨", "→", "↔", "|", ";", "↦", "=>"})

_REAL_FUNCTIONS = {"sqrt": "Real.sqrt"}

_NL_EXTREMUM = re.compile(
    r"\b(maximal|maximum|minimal|minimum|largest|smallest|greatest|least)\b", re.I
)
_NL_SOLUTION_COUNT = re.compile(
    r"how many|number of (?:\w+ )?solutions|sum of (?:all )?(?:the )?solutions", re.I
)
_NL_INFINITUDE = re.compile(r"infinitely many|infinite number", re.I)
_NL_DIGITS = re.compile(r"\bdigits?\b", re.I)
_NL_TRIANGLE = re.compile(r"triangle", re.I)


@dataclass(frozen=True)
class _Fix:
    rule_id: str
    span: tuple[int, int]  # character offsets
    suggestion: str


def lint(text: str, nl_text: str | None = None) -> LintReport:
    """Run every rule against a statement; pure and deterministic."""
    byte_of = _byte_offset_table(text)
    try:
        parsed, spans = parse_with_spans(text)
    except ParseError:
        finding = Finding("parse_failure", (0, byte_of[len(text)]), FindingSeverity.FLAG)
        return LintReport(findings=(finding,))

    regions: list[list[Token]] = [toks for toks in spans.binder_type_tokens if toks]
    regions.append(spans.goal_tokens)

    fixes = _collect_fixes(text, regions, parsed)
    findings = [
        Finding(f.rule_id, (byte_of[f.span[0]], byte_of[f.span[1]]), FindingSeverity.FIXABLE, f.suggestion)
        for f in sorted(fixes, key=lambda f: f.span)
    ]
    findings.extend(_flag_findings(text, nl_text, parsed, spans, byte_of))
    findings.sort(key=lambda f: f.span)
    _check_fixable_disjoint(findings)
    return LintReport(findings=tuple(findings))


def apply_fixes(text: str, report: LintReport) -> str:
    """Apply every fixable suggestion right-to-left by span.

    The report must have been produced from exactly this text.
    """
    fixable = sorted(report.fixable, key=lambda f: f.span)
    _check_fixable_disjoint(fixable)
    data = text.encode("utf-8")
    for finding in reversed(fixable):
        start, end = finding.span
        if start < 0 or end > len(data):
            raise ValidationError(f"finding span {finding.span} outside input bounds")
        if finding.suggestion is None:
            raise ValidationError(f"fixable finding {finding.rule_id} without suggestion")
        data = data[:start] + finding.suggestion.encode("utf-8") + data[end:]
    return data.decode("utf-8")


def _check_fixable_disjoint(findings) -> None:
    prev_end = -1
    for f in findings:
        if isinstance(f, Finding) and f.severity is not FindingSeverity.FIXABLE:
            continue
        if f.span[0] < prev_end:
            raise ValidationError(f"overlapping fixable spans at {f.span}")
        prev_end = f.span[1]


def _byte_offset_table(text: str) -> list[int]:
    offsets = [0] * (len(text) + 1)
    total = 0
    for i, ch in enumerate(text):
        offsets[i] = total
        total += len(ch.encode("utf-8"))
    offsets[len(text)] = total
    return offsets


# ---------------------------------------------------------------------------
# fixable rules


def _collect_fixes(text: str, regions: list[list[Token]], parsed) -> list[_Fix]:
    real_context = _mentions_real(regions)
    atoms: list[_Fix] = []
    for toks in regions:
        atoms.extend(_missing_operator_fixes(toks))
        atoms.extend(_nat_division_fixes(toks, real_context))
        atoms.extend(_namespace_fixes(toks, real_context))

    out: list[_Fix] = []
    consumed: set[tuple[int, int]] = set()
    for toks in regions:
        out.extend(_chain_fixes(text, toks, atoms, consumed))
    out.extend(a for a in atoms if a.span not in consumed)
    return out


def _mentions_real(regions: list[list[Token]]) -> bool:
    return any(t.text == "ℝ" for toks in regions for t in toks)


def _missing_operator_fixes(toks: list[Token]) -> list[_Fix]:
    fixes = []
    for a, b in zip(toks, toks[1:]):
        if (
            a.text.isdigit()
            and b.start == a.end
            and len(b.text) == 1
            and b.text.isalpha()
        ):
            fixes.append(_Fix("missing_operator", (a.start, b.end), f"{a.text}*{b.text}"))
    return fixes


def _nat_division_fixes(toks: list[Token], real_context: bool) -> list[_Fix]:
    if not real_context:
        return []
    fixes = []
    for i in range(len(toks) - 5):
        window = toks[i : i + 6]
        texts = [t.text for t in window]
        if (
            texts[0] == "^"
            and texts[1] == "("
            and texts[2].isdigit()
            and texts[3] == "/"
            and texts[4].isdigit()
            and texts[5] == ")"
        ):
            span = (window[1].start, window[5].end)
            fixes.append(_Fix("nat_division", span, f"(({texts[2]}:ℝ)/{texts[4]})"))
    return fixes


def _namespace_fixes(toks: list[Token], real_context: bool) -> list[_Fix]:
    if not real_context:
        return []
    return [
        _Fix("namespace_qualification", (t.start, t.end), _REAL_FUNCTIONS[t.text])
        for t in toks
        if t.text in _REAL_FUNCTIONS
    ]


def _chain_fixes(
    text: str,
    toks: list[Token],
    atoms: list[_Fix],
    consumed: set[tuple[int, int]],
) -> list[_Fix]:
    """Find comparison chains, innermost bracket groups first.

    Nested fixable rewrites inside a chain operand are folded into the chain
    suggestion (and marked consumed) so fixable spans never overlap.
    """
    out: list[_Fix] = []

    def scan(level: list[Token]) -> None:
        # recurse into bracket interiors first so inner chains are found
        i = 0
        while i < len(level):
            if level[i].text in OPEN_BRACKETS:
                close = _match_in(level, i)
                scan(level[i + 1 : close])
                i = close + 1
            else:
                i += 1
        for segment in _segments(level):
            fix = _build_chain(text, segment, atoms, out, consumed)
            if fix is not None:
                out.append(fix)

    scan(toks)
    return [f for f in out if f.span not in consumed]


def _match_in(level: list[Token], open_idx: int) -> int:
    depth = 0
    for j in range(open_idx, len(level)):
        if level[j].text in OPEN_BRACKETS:
            depth += 1
        elif level[j].text in CLOSE_BRACKETS:
            depth -= 1
            if depth == 0:
                return j
    return len(level) - 1


def _segments(level: list[Token]) -> list[list[Token]]:
    segments: list[list[Token]] = []
    current: list[Token] = []
    depth = 0
    for t in level:
        if t.text in OPEN_BRACKETS:
            depth += 1
        elif t.text in CLOSE_BRACKETS:
            depth -= 1
        if depth == 0 and t.text in _SEGMENT_SEPARATORS:
            segments.append(current)
            current = []
        else:
            current.append(t)
    segments.append(current)
    return segments


def _build_chain(
    text: str,
    segment: list[Token],
    atoms: list[_Fix],
    prior_chains: list[_Fix],
    consumed: set[tuple[int, int]],
) -> _Fix | None:
    if len(segment) < 5:
        return None
    ops: list[Token] = []
    depth = 0
    for t in segment:
        if t.text in OPEN_BRACKETS:
            depth += 1
        elif t.text in CLOSE_BRACKETS:
            depth -= 1
        elif depth == 0 and t.text in _CHAIN_OPS:
            ops.append(t)
    if len(ops) < 2:
        return None

    bounds = [segment[0].start] + [op.start for op in ops] + [segment[-1].end]
    operands: list[tuple[int, int]] = []
    for k in range(len(ops) + 1):
        lo = bounds[k] if k == 0 else ops[k - 1].end
        hi = ops[k].start if k < len(ops) else segment[-1].end
        piece = text[lo:hi]
        stripped = piece.strip()
        if not stripped:
            return None
        start = lo + (len(piece) - len(piece.lstrip()))
        operands.append((start, start + len(stripped)))

    inner = [f for f in atoms + prior_chains if f.span not in consumed]
    rendered = [_apply_inside(text, span, inner, consumed) for span in operands]
    pieces = [
        f"{rendered[k]} {ops[k].text} {rendered[k + 1]}" for k in range(len(ops))
    ]
    span = (operands[0][0], operands[-1][1])
    return _Fix("chained_inequality", span, " ∧ ".join(pieces))


def _apply_inside(
    text: str,
    span: tuple[int, int],
    candidates: list[_Fix],
    consumed: set[tuple[int, int]],
) -> str:
    lo, hi = span
    piece = text[lo:hi]
    inside = [f for f in candidates if lo <= f.span[0] and f.span[1] <= hi]
    for f in sorted(inside, key=lambda f: f.span, reverse=True):
        piece = piece[: f.span[0] - lo] + f.suggestion + piece[f.span[1] - lo :]
        consumed.add(f.span)
    return piece


# ---------------------------------------------------------------------------
# flag rules


def _flag_findings(text, nl_text, parsed, spans, byte_of) -> list[Finding]:
    goal_span = (byte_of[spans.goal_span[0]], byte_of[spans.goal_span[1]])
    all_tokens = [t for toks in spans.binder_type_tokens for t in toks] + list(spans.goal_tokens)
    token_texts = {t.text for t in all_tokens}
    findings: list[Finding] = []

    enum_span = _tuple_enumeration_span(spans.goal_tokens)
    if enum_span is not None:
        findings.append(
            Finding(
                "all_solutions_enumeration",
                (byte_of[enum_span[0]], byte_of[enum_span[1]]),
                FindingSeverity.FLAG,
            )
        )

    if nl_text:
        if _NL_TRIANGLE.search(nl_text) and not _has_triangle_hypothesis(spans.binder_type_tokens):
            findings.append(Finding("triangle_condition", goal_span, FindingSeverity.FLAG))
        if (
            _NL_EXTREMUM.search(nl_text)
            and _goal_is_bare_comparison(spans.goal_tokens)
            and not ({"IsGreatest", "IsLeast"} & token_texts)
        ):
            findings.append(Finding("missing_extremum_witness", goal_span, FindingSeverity.FLAG))
        if _NL_SOLUTION_COUNT.search(nl_text) and not _has_finset_cardinality(token_texts):
            findings.append(Finding("solution_count_set", goal_span, FindingSeverity.FLAG))
        if _NL_INFINITUDE.search(nl_text) and not _has_infinitude_shape(spans.goal_tokens, token_texts):
            findings.append(Finding("infinitude_witness", goal_span, FindingSeverity.FLAG))
        if _NL_DIGITS.search(nl_text) and not _mentions_digits(token_texts):
            findings.append(Finding("digit_decomposition", goal_span, FindingSeverity.FLAG))

    return findings


def _tuple_enumeration_span(goal_toks: list[Token]) -> tuple[int, int] | None:
    """Detect ')=(' tuple equality followed by ',(' at the same depth."""
    depth = 0
    for i, t in enumerate(goal_toks):
        if t.text in OPEN_BRACKETS:
            depth += 1
        elif t.text in CLOSE_BRACKETS:
            depth -= 1
        elif (
            t.text == "="
            and i > 0
            and goal_toks[i - 1].text == ")"
            and i + 1 < len(goal_toks)
            and goal_toks[i + 1].text == "("
        ):
            d = 0
            for j in range(i + 1, len(goal_toks)):
                if goal_toks[j].text in OPEN_BRACKETS:
                    d += 1
                elif goal_toks[j].text in CLOSE_BRACKETS:
                    d -= 1
                elif d == 0 and goal_toks[j].text == ",":
                    if j + 1 < len(goal_toks) and goal_toks[j + 1].text == "(":
                        end = _match_in(goal_toks, j + 1)
                        return (t.start, goal_toks[end].end)
                    break
                elif d == 0 and goal_toks[j].text in _SEGMENT_SEPARATORS:
                    break
    return None


def _has_triangle_hypothesis(binder_type_tokens: list[list[Token]]) -> bool:
    for toks in binder_type_tokens:
        texts = [t.text for t in toks]
        for i in range(len(texts) - 4):
            a, plus, b, gt, c = texts[i : i + 5]
            if plus == "+" and gt in (">", "<") and all(s and s[0].isalpha() for s in (a, b, c)):
                return True
    return False


def _goal_is_bare_comparison(goal_toks: list[Token]) -> bool:
    depth = 0
    for t in goal_toks:
        if t.text in OPEN_BRACKETS:
            depth += 1
        elif t.text in CLOSE_BRACKETS:
            depth -= 1
        elif depth == 0 and t.text in ("≤", "≥", "<", ">", "<=", ">="):
            return True
    return False


def _has_finset_cardinality(token_texts: set[str]) -> bool:
    if "Finset" in token_texts:
        return True
    return any(t == ".card" or t.endswith(".card") for t in token_texts)


def _has_infinitude_shape(goal_toks: list[Token], token_texts: set[str]) -> bool:
    if any(t == "Infinite" or t.endswith(".Infinite") for t in token_texts):
        return True
    saw_forall = False
    for t in goal_toks:
        if t.text == "∀":
            saw_forall = True
        elif t.text in ("∃", "∃!") and saw_forall:
            return True
    return False


def _mentions_digits(token_texts: set[str]) -> bool:
    return any(t in ("Nat.digits", "Nat.toDigits") or t.endswith(".digits") for t in token_texts)
