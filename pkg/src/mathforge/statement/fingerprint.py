"""Canonical statement digests for deduplication.

The digest is a stable hash of the token stream after renaming the theorem to
a placeholder, expanding each binder group to one name per group, and
canonicalizing whitespace. It is therefore invariant under theorem rename,
whitespace changes, and order-preserving binder re-bracketing, and sensitive
to any goal or hypothesis token change.

Unparseable text hashes its whitespace-collapsed form under a distinct
``raw:`` prefix so the flagged case is visible in the digest itself.
"""

from __future__ import annotations

import hashlib

from mathforge.errors import ParseError
from mathforge.statement.parser import ParsedTheorem, parse_statement
from mathforge.statement.tokens import tokenize

_PLACEHOLDER = "\x00stmt"


def canonical_fingerprint(text: str) -> str:
    try:
        parsed = parse_statement(text)
    except ParseError:
        collapsed = " ".join(text.split())
        return "raw:" + _sha(collapsed)
    return "st:" + _sha(" ".join(_canonical_tokens(parsed)))


def _canonical_tokens(parsed: ParsedTheorem) -> list[str]:
    toks = ["theorem", _PLACEHOLDER]
    for binder in parsed.binders:
        open_, close = binder.kind.brackets
        type_toks = [t.text for t in tokenize(binder.type_text)]
        if binder.names:
            for name in binder.names:
                toks += [open_, name, ":", *type_toks, close]
        else:
            toks += [open_, *type_toks, close]
    toks += [":", *(t.text for t in tokenize(parsed.goal_text))]
    toks += [":=", "by", "sorry"]
    return toks


def _sha(payload: str) -> str:
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
