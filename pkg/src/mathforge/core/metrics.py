"""Round metrics: CPN/NPN counting, weighted sampled accuracy, pass@k.

Internal rates are exact fractions; rounding happens only at display, half-up
to one decimal place.
"""

from __future__ import annotations

import decimal
from collections import Counter
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from mathforge.core.types import PassAtK, Problem, RoundManifest, TranslationCandidate
from mathforge.errors import ValidationError


def compute_round_stats(
    candidates: Iterable[TranslationCandidate],
    problems_by_id: Mapping[str, Problem] | None = None,
    round_no: int | None = None,
) -> RoundManifest:
    """Count compile and NLI passes over one round's candidates.

    Per-tag counts are derived from each NLI-passing candidate's problem tags
    (a multi-tagged problem counts once per tag) and need the problem lookup.
    """
    translated = 0
    cpn = 0
    npn = 0
    seen_round: int | None = None
    per_tag: Counter[str] = Counter()
    for cand in candidates:
        if seen_round is None:
            seen_round = cand.round
        elif cand.round != seen_round:
            raise ValidationError(
                f"mixed rounds in input: {seen_round} and {cand.round}"
            )
        translated += 1
        if cand.compiles:
            cpn += 1
            if cand.nli_passed:
                npn += 1
                if problems_by_id is not None:
                    problem = problems_by_id.get(cand.problem_id)
                    if problem is not None:
                        per_tag.update(set(problem.tags))
    if seen_round is None:
        seen_round = round_no if round_no is not None else 0
    if round_no is not None and seen_round != round_no:
        raise ValidationError(f"candidates are for round {seen_round}, expected {round_no}")
    return RoundManifest(
        round=seen_round,
        translated_count=translated,
        cpn=cpn,
        npn=npn,
        per_tag_counts=dict(per_tag),
    )


def expand_verdict_table(
    rows: Iterable[Mapping], round_no: int = 0
) -> Iterable[TranslationCandidate]:
    """Expand aggregated verdict rows into one lightweight candidate per unit.

    Rows look like {"compile": "statement_pass", "nli": "positive", "count": N}.
    Shared verdict objects keep the expansion cheap enough to replay
    six-figure funnel totals in well under a second.
    """
    from mathforge.core.types import Verdict
    from mathforge.repl.verdict import CompileKind, CompileVerdict

    for row_no, row in enumerate(rows):
        compile_kind = row.get("compile")
        verdict = (
            CompileVerdict(kind=CompileKind(compile_kind)) if compile_kind else None
        )
        template = TranslationCandidate(
            problem_id=row.get("problem_id", f"expanded-{row_no}"),
            round=round_no,
            sample_index=0,
            statement_text=row.get("statement_text", "theorem expanded : True := by sorry"),
            compile=verdict,
            nli=Verdict(row.get("nli", "indeterminate")),
            fingerprint=row.get("fingerprint", "st:expanded"),
        )
        # flyweight: counting reads values only, so one instance per row serves
        # every unit of its count
        for _ in range(int(row["count"])):
            yield template


AccuracyRow = tuple[str, int, int, int]  # (tag, count, sampled_correct, sampled_total)


def weighted_accuracy(rows: Sequence[AccuracyRow]) -> float:
    """Count-weighted mean of per-tag sampled accuracies."""
    if not rows:
        raise ValidationError("weighted_accuracy needs at least one row")
    numerator = Fraction(0)
    total_count = 0
    for tag, count, correct, sampled_total in rows:
        if sampled_total < 1:
            raise ValidationError(f"row {tag!r}: sampled_total must be >= 1")
        if count < 0:
            raise ValidationError(f"row {tag!r}: count must be >= 0")
        if not (0 <= correct <= sampled_total):
            raise ValidationError(f"row {tag!r}: correct outside [0, sampled_total]")
        numerator += count * Fraction(correct, sampled_total)
        total_count += count
    if total_count == 0:
        raise ValidationError("total count across rows is zero")
    return float(numerator / total_count)


def pass_rate(solved: int, total: int, k: int) -> PassAtK:
    """Fraction of statements with at least one verified proof among k samples."""
    if total <= 0:
        raise ValidationError("total must be > 0")
    if not (0 <= solved <= total):
        raise ValidationError("solved must be in [0, total]")
    return PassAtK(solved=solved, total=total, k=k, rate=Fraction(solved, total))


def format_percent(rate: Fraction | float, decimals: int = 1) -> str:
    """Render a rate as a percentage, rounding half-up."""
    if isinstance(rate, Fraction):
        value = decimal.Decimal(rate.numerator) / decimal.Decimal(rate.denominator)
    else:
        value = decimal.Decimal(repr(rate))
    quantum = decimal.Decimal(1).scaleb(-decimals)
    shown = (value * 100).quantize(quantum, rounding=decimal.ROUND_HALF_UP)
    return f"{shown}%"
