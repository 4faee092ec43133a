"""Best-of-k mode for hard problems: sample wide, dedupe, filter, rank.

Used for IMO-level formalization: k samples at high temperature collapse by
fingerprint, then the compile and NLI filters run once per distinct statement.
Survivors come back ordered by (NLI pass, frequency among the k samples) for
manual evaluation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from mathforge.core.types import Problem, Verdict
from mathforge.errors import ParseError, ValidationError
from mathforge.gateway.ops import back_translate, judge_nli, translate
from mathforge.pipeline.round import StageBackends
from mathforge.repl.verdict import CompileKind, CompileVerdict
from mathforge.statement.fingerprint import canonical_fingerprint
from mathforge.statement.parser import normalize_statement, parse_statement

IMO_DEFAULT_K = 100
IMO_DEFAULT_TEMPERATURE = 0.7


@dataclass(frozen=True)
class ImoCandidate:
    statement_text: str
    fingerprint: str
    frequency: int
    compile: CompileVerdict
    back_translation: str
    nli: Verdict


def imo_mode(
    problem: Problem,
    pool,
    backends: StageBackends,
    k: int = IMO_DEFAULT_K,
    temperature: float = IMO_DEFAULT_TEMPERATURE,
) -> list[ImoCandidate]:
    """Translate k times, dedupe by fingerprint, filter by compile then NLI.

    Returns surviving distinct candidates; empty means the problem is
    unformalizable this round.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    raw_samples = translate(
        problem, k, temperature, backends.translator, key=f"imo:{problem.id}"
    )

    groups: Counter[str] = Counter()
    texts: dict[str, str] = {}
    for raw in raw_samples:
        text = raw.strip()
        try:
            text = normalize_statement(parse_statement(text))
        except ParseError:
            pass  # unparseable samples still dedupe by raw digest
        fp = canonical_fingerprint(text)
        groups[fp] += 1
        texts.setdefault(fp, text)

    survivors: list[ImoCandidate] = []
    for fp, freq in groups.most_common():
        text = texts[fp]
        if fp.startswith("raw:"):
            continue
        verdict = pool.check_statement(text)
        if verdict.kind is not CompileKind.STATEMENT_PASS:
            continue
        back_nl = back_translate(text, backends.back, key=f"imo-fl2nl:{problem.id}:{fp[:12]}")
        tri = judge_nli(
            problem.nl_text, back_nl, backends.nli_judge, key=f"imo-nli:{problem.id}:{fp[:12]}"
        )
        nli = Verdict(tri.value)
        if nli is not Verdict.POSITIVE:
            continue
        survivors.append(
            ImoCandidate(
                statement_text=text,
                fingerprint=fp,
                frequency=freq,
                compile=verdict,
                back_translation=back_nl,
                nli=nli,
            )
        )
    survivors.sort(key=lambda c: (c.nli is not Verdict.POSITIVE, -c.frequency, c.fingerprint))
    return survivors
