"""Tokenizer for Lean 4 theorem headers.

Splits statement text into identifiers (with qualification dots), numbers,
string literals, brackets, and operator symbols, keeping character spans into
the original text. Comments (``--`` line and nested ``/- -/`` block, including
``/--`` doc comments) are skipped as trivia.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from mathforge.errors import ParseError

OPEN_BRACKETS = {"(": ")", "{": "}", "[": "]", "⟨": "⟩", "⦃": "⦄"}
CLOSE_BRACKETS = {v: k for k, v in OPEN_BRACKETS.items()}

# Longest match first; '∃!' is a single notation token in Lean.
_MULTI_CHAR_OPS = (":=", "<->", "<=", ">=", "=>", "->", "==", "∃!")

_IDENT_EXTRA = "_'"


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_continue(ch: str) -> bool:
    return ch.isalnum() or ch in _IDENT_EXTRA


def _is_modifier(ch: str) -> bool:
    # Superscript modifiers such as 'ˢ' in '×ˢ' bind to the preceding symbol.
    return unicodedata.category(ch) in ("Lm", "Mn")


_SUPERSCRIPTS = set("⁻⁰¹²³⁴⁵⁶⁷⁸⁹ⁿ⁺ᵀ")


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int

    def __str__(self) -> str:
        return self.text


def tokenize(text: str) -> list[Token]:
    """Tokenize statement text; raises ParseError on unterminated constructs."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("--", i):
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        if text.startswith("/-", i):
            i = _skip_block_comment(text, i)
            continue
        if ch == '"':
            j = _scan_string(text, i)
            tokens.append(Token(text[i:j], i, j))
            i = j
            continue
        if ch.isdigit():
            j = _scan_number(text, i)
            tokens.append(Token(text[i:j], i, j))
            i = j
            continue
        if _is_ident_start(ch):
            j = _scan_ident(text, i)
            tokens.append(Token(text[i:j], i, j))
            i = j
            continue
        if ch == "." and i + 1 < n and (_is_ident_start(text[i + 1]) or text[i + 1].isdigit()):
            # leading-dot projection: '.Finite' after a brace, '.1' after a paren
            j = _scan_ident(text, i + 1) if _is_ident_start(text[i + 1]) else _scan_numeric_projection(text, i + 1)
            tokens.append(Token(text[i:j], i, j))
            i = j
            continue
        for op in _MULTI_CHAR_OPS:
            if text.startswith(op, i):
                tokens.append(Token(op, i, i + len(op)))
                i += len(op)
                break
        else:
            j = i + 1
            while j < n and _is_modifier(text[j]):
                j += 1
            tokens.append(Token(text[i:j], i, j))
            i = j
    return _merge_glued_notation(tokens)


def _skip_block_comment(text: str, i: int) -> int:
    depth = 0
    start = i
    n = len(text)
    while i < n:
        if text.startswith("/-", i):
            depth += 1
            i += 2
        elif text.startswith("-/", i):
            depth -= 1
            i += 2
            if depth == 0:
                return i
        else:
            i += 1
    raise ParseError("unterminated block comment", start)


def _scan_string(text: str, i: int) -> int:
    j = i + 1
    n = len(text)
    while j < n:
        if text[j] == "\\":
            j += 2
            continue
        if text[j] == '"':
            return j + 1
        j += 1
    raise ParseError("unterminated string literal", i)


def _scan_number(text: str, i: int) -> int:
    j = i
    n = len(text)
    while j < n and text[j].isdigit():
        j += 1
    if j < n - 1 and text[j] == "." and text[j + 1].isdigit():
        j += 1
        while j < n and text[j].isdigit():
            j += 1
    return j


def _scan_ident(text: str, i: int) -> int:
    j = i
    n = len(text)
    while j < n and _is_ident_continue(text[j]):
        j += 1
    # qualification and projections: 'Nat.gcd', 'Finset.range', 'p.1'
    while j < n - 1 and text[j] == "." and (_is_ident_start(text[j + 1]) or text[j + 1].isdigit()):
        j += 1
        while j < n and _is_ident_continue(text[j]):
            j += 1
    return j


def _scan_numeric_projection(text: str, i: int) -> int:
    j = i
    n = len(text)
    while j < n and text[j].isdigit():
        j += 1
    return j


def _merge_glued_notation(tokens: list[Token]) -> list[Token]:
    """Re-glue notation that reads as one atom, e.g. 'ℝ≥0∞' and 'x⁻¹'."""
    out: list[Token] = []
    i = 0
    while i < len(tokens):
        t = tokens[i]
        # superscript runs ('⁻¹') bind to whatever they follow
        if out and t.text and all(ch in _SUPERSCRIPTS for ch in t.text) and t.start == out[-1].end:
            prev = out.pop()
            out.append(Token(prev.text + t.text, prev.start, t.end))
            i += 1
            continue
        if (
            t.text in ("ℝ", "ℚ")
            and i + 2 < len(tokens)
            and tokens[i + 1].text == "≥"
            and tokens[i + 2].text == "0"
            and tokens[i + 1].start == t.end
            and tokens[i + 2].start == tokens[i + 1].end
        ):
            merged = t.text + "≥0"
            end = tokens[i + 2].end
            i += 3
            if i < len(tokens) and tokens[i].text == "∞" and tokens[i].start == end:
                merged += "∞"
                end = tokens[i].end
                i += 1
            out.append(Token(merged, t.start, end))
            continue
        out.append(t)
        i += 1
    return out


_NO_SPACE_BEFORE = set(CLOSE_BRACKETS) | {",", ";"}
_NO_SPACE_AFTER = set(OPEN_BRACKETS)


def join_tokens(texts: list[str]) -> str:
    """Render token texts with canonical spacing.

    Single spaces everywhere except inside bracket walls, before commas, and
    before dotted projections ('}.Finite'). Stable under re-tokenization.
    """
    parts: list[str] = []
    prev = ""
    for t in texts:
        if not parts:
            parts.append(t)
        elif prev in _NO_SPACE_AFTER or t in _NO_SPACE_BEFORE or t.startswith("."):
            parts.append(t)
        else:
            parts.append(" " + t)
        prev = t
    return "".join(parts)
