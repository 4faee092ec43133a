"""Parse Lean 4 theorem headers into name, binder groups, goal, and terminator."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable

from mathforge.errors import ParseError
from mathforge.statement.tokens import (
    CLOSE_BRACKETS,
    OPEN_BRACKETS,
    Token,
    join_tokens,
    tokenize,
)

_DECL_KEYWORDS = ("theorem", "lemma")

_BINDER_OPENERS = {"(", "{", "[", "⦃"}


class BinderKind(str, enum.Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"
    INSTANCE = "instance"
    STRICT_IMPLICIT = "strict_implicit"

    @property
    def brackets(self) -> tuple[str, str]:
        return _KIND_BRACKETS[self]


_KIND_BRACKETS = {
    BinderKind.EXPLICIT: ("(", ")"),
    BinderKind.IMPLICIT: ("{", "}"),
    BinderKind.INSTANCE: ("[", "]"),
    BinderKind.STRICT_IMPLICIT: ("⦃", "⦄"),
}
_OPENER_KIND = {open_: kind for kind, (open_, _) in _KIND_BRACKETS.items()}


class Terminator(str, enum.Enum):
    SORRY = "sorry"
    PROOF_BODY = "proof_body"
    MISSING = "missing"


@dataclass(frozen=True)
class Binder:
    """One binder group, e.g. '(n p : ℕ)' or '{M : Set ℂ}' or '[Fact p.Prime]'."""

    names: tuple[str, ...]
    type_text: str
    kind: BinderKind


@dataclass(frozen=True)
class ParsedTheorem:
    keyword: str
    name: str
    binders: tuple[Binder, ...]
    goal_text: str
    terminator: Terminator
    proof_text: str | None = None

    @property
    def hypotheses(self) -> tuple[Binder, ...]:
        """Binders whose type reads as a proposition rather than a carrier type."""
        return tuple(b for b in self.binders if is_prop_shaped(b.type_text))


@dataclass
class ParseSpans:
    """Character-offset side channel for lint rules; parallel to ParsedTheorem."""

    name: tuple[int, int]
    binder_type_tokens: list[list[Token]]
    binder_spans: list[tuple[int, int]]
    goal_tokens: list[Token]
    goal_span: tuple[int, int]


def parse_statement(text: str) -> ParsedTheorem:
    parsed, _ = parse_with_spans(text)
    return parsed


def parse_with_spans(text: str) -> tuple[ParsedTheorem, ParseSpans]:
    tokens = tokenize(text)
    if not tokens:
        raise ParseError("empty statement", 0)
    _check_balance(tokens)

    if tokens[0].text not in _DECL_KEYWORDS:
        raise ParseError("expected 'theorem' or 'lemma'", tokens[0].start)
    depth = 0
    for tok in tokens[1:]:
        if tok.text in OPEN_BRACKETS:
            depth += 1
        elif tok.text in CLOSE_BRACKETS:
            depth -= 1
        elif depth == 0 and tok.text in _DECL_KEYWORDS:
            raise ParseError("multiple declarations in input", tok.start)

    if len(tokens) < 2:
        raise ParseError("missing theorem name", tokens[0].end)
    name_tok = tokens[1]
    if not _is_valid_name(name_tok.text):
        raise ParseError(f"invalid theorem name {name_tok.text!r}", name_tok.start)

    i = 2
    binders: list[Binder] = []
    binder_type_tokens: list[list[Token]] = []
    binder_spans: list[tuple[int, int]] = []
    while i < len(tokens) and tokens[i].text in _BINDER_OPENERS:
        close = _matching(tokens, i)
        interior = tokens[i + 1 : close]
        binder, type_toks = _parse_binder(interior, _OPENER_KIND[tokens[i].text], tokens[i].start)
        binders.append(binder)
        binder_type_tokens.append(type_toks)
        binder_spans.append((tokens[i].start, tokens[close].end))
        i = close + 1

    if i >= len(tokens) or tokens[i].text != ":":
        pos = tokens[i].start if i < len(tokens) else tokens[-1].end
        raise ParseError("expected ':' before the goal", pos)
    i += 1

    goal_toks: list[Token] = []
    depth = 0
    assign = None
    for j in range(i, len(tokens)):
        t = tokens[j]
        if t.text in OPEN_BRACKETS:
            depth += 1
        elif t.text in CLOSE_BRACKETS:
            depth -= 1
        elif t.text == ":=" and depth == 0:
            assign = j
            break
        goal_toks.append(t)
    if not goal_toks:
        raise ParseError("empty goal", tokens[i - 1].end)

    if assign is None:
        terminator, proof_text = Terminator.MISSING, None
    else:
        proof_toks = [t.text for t in tokens[assign + 1 :]]
        if proof_toks in (["sorry"], ["by", "sorry"]):
            terminator, proof_text = Terminator.SORRY, None
        elif not proof_toks:
            terminator, proof_text = Terminator.MISSING, None
        else:
            terminator, proof_text = Terminator.PROOF_BODY, join_tokens(proof_toks)

    parsed = ParsedTheorem(
        keyword=tokens[0].text,
        name=name_tok.text,
        binders=tuple(binders),
        goal_text=join_tokens([t.text for t in goal_toks]),
        terminator=terminator,
        proof_text=proof_text,
    )
    spans = ParseSpans(
        name=(name_tok.start, name_tok.end),
        binder_type_tokens=binder_type_tokens,
        binder_spans=binder_spans,
        goal_tokens=goal_toks,
        goal_span=(goal_toks[0].start, goal_toks[-1].end),
    )
    return parsed, spans


def _check_balance(tokens: list[Token]) -> None:
    stack: list[Token] = []
    for tok in tokens:
        if tok.text in OPEN_BRACKETS:
            stack.append(tok)
        elif tok.text in CLOSE_BRACKETS:
            if not stack or OPEN_BRACKETS[stack[-1].text] != tok.text:
                raise ParseError(f"unbalanced {tok.text!r}", tok.start)
            stack.pop()
    if stack:
        raise ParseError(f"unclosed {stack[-1].text!r}", stack[-1].start)


def _matching(tokens: list[Token], open_idx: int) -> int:
    want = OPEN_BRACKETS[tokens[open_idx].text]
    depth = 0
    for j in range(open_idx, len(tokens)):
        t = tokens[j].text
        if t in OPEN_BRACKETS:
            depth += 1
        elif t in CLOSE_BRACKETS:
            depth -= 1
            if depth == 0:
                if t != want:
                    raise ParseError(f"mismatched bracket {t!r}", tokens[j].start)
                return j
    raise ParseError("unclosed bracket", tokens[open_idx].start)


def _parse_binder(
    interior: list[Token], kind: BinderKind, pos: int
) -> tuple[Binder, list[Token]]:
    colon = None
    depth = 0
    for j, t in enumerate(interior):
        if t.text in OPEN_BRACKETS:
            depth += 1
        elif t.text in CLOSE_BRACKETS:
            depth -= 1
        elif t.text == ":" and depth == 0:
            colon = j
            break
    if colon is None:
        # anonymous binder, common for instances: [Fact p.Prime]
        return Binder(names=(), type_text=join_tokens([t.text for t in interior]), kind=kind), list(interior)
    names = tuple(t.text for t in interior[:colon])
    if not names:
        raise ParseError("binder group without names", pos)
    type_toks = interior[colon + 1 :]
    if not type_toks:
        raise ParseError("binder group without a type", pos)
    return Binder(names=names, type_text=join_tokens([t.text for t in type_toks]), kind=kind), list(type_toks)


def _is_valid_name(text: str) -> bool:
    if not text:
        return False
    first = text[0]
    if not (first.isalpha() or first == "_"):
        return False
    return all(ch.isalnum() or ch in "_.'" for ch in text)


# Tokens and head identifiers that make a binder type read as a proposition.
_PROP_OPERATOR_TOKENS = frozenset(
    {
        "=", "≠", "<", ">", "<=", ">=", "≤", "≥",
        "∣", "∤", "∈", "∉", "⊆", "⊂", "∧", "∨", "↔", "¬", "∀", "∃", "∃!", "≡",
    }
)
_PROP_HEAD_IDENTS = frozenset(
    {
        "True", "False", "Prime", "Coprime", "IsGreatest", "IsLeast", "IsCompact",
        "Irrational", "Odd", "Even", "Injective", "Surjective", "Bijective",
        "Monotone", "StrictMono", "StrictAnti", "Continuous", "ContinuousOn",
        "Finite", "Infinite", "Nonempty", "Disjoint", "Squarefree", "Fact",
    }
)


def is_prop_shaped(type_text: str) -> bool:
    """Heuristic: does this binder type state a condition rather than a carrier?"""
    try:
        toks = tokenize(type_text)
    except ParseError:
        return False
    for t in toks:
        if t.text in _PROP_OPERATOR_TOKENS:
            return True
        tail = t.text.rsplit(".", 1)[-1]
        if tail in _PROP_HEAD_IDENTS:
            return True
    return False


def serialize(parsed: ParsedTheorem) -> str:
    """Render a parsed theorem with canonical single-space token separation."""
    parts = [parsed.keyword, parsed.name]
    for b in parsed.binders:
        open_, close = b.kind.brackets
        if b.names:
            parts.append(f"{open_}{' '.join(b.names)} : {b.type_text}{close}")
        else:
            parts.append(f"{open_}{b.type_text}{close}")
    parts.append(":")
    parts.append(parsed.goal_text)
    if parsed.terminator is Terminator.SORRY:
        parts.append(":= by sorry")
    elif parsed.terminator is Terminator.PROOF_BODY:
        parts.append(f":= {parsed.proof_text}")
    return " ".join(parts)


NamePolicy = Callable[[str], str]


def normalize_statement(parsed: ParsedTheorem, name_policy: NamePolicy | str | None = None) -> str:
    """Serialize with the terminator forced to ':= by sorry' and the name renamed.

    Idempotent: normalizing the output parses back to the same value.
    """
    name = parsed.name
    if isinstance(name_policy, str):
        name = name_policy
    elif callable(name_policy):
        name = name_policy(parsed.name)
    return serialize(replace(parsed, name=name, terminator=Terminator.SORRY, proof_text=None))
