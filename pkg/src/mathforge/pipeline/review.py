"""Human review: diagnostic batch selection and label merging.

Two selection strategies mirror the diagnostic modes: pattern_triage draws
the failures (compile errors and NLI rejections), tag_stratified samples
NLI-passing candidates per tag with a seeded RNG, ten for the three most
frequent tags and five otherwise, considering only tags with more than 100
candidates.
"""

from __future__ import annotations

import random
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from mathforge.core.store import Store
from mathforge.core.types import HumanVerdict, Problem, TranslationCandidate
from mathforge.errors import ValidationError
from mathforge.repl.verdict import CompileKind, CompileVerdict

STRATIFIED_MIN_TAG_COUNT = 100
TOP_TAG_QUOTA = 10
OTHER_TAG_QUOTA = 5
TOP_TAG_RANKS = 3


@dataclass(frozen=True)
class ReviewBatch:
    round: int
    items: tuple[str, ...]  # candidate keys, review order
    strategy: str  # pattern_triage | tag_stratified
    quota_map: dict[str, int] = field(default_factory=dict)


def enqueue_review(
    candidates: Sequence[TranslationCandidate],
    problems_by_id: Mapping[str, Problem],
    round_no: int,
    strategy: str = "pattern_triage",
    seed: int = 0,
) -> ReviewBatch:
    """Build a review batch from one round's journaled candidates."""
    in_round = [c for c in candidates if c.round == round_no]
    if strategy == "pattern_triage":
        triage = [
            c
            for c in in_round
            if not c.compiles or (c.compiles and c.nli is not c.nli.POSITIVE)
        ]
        items = tuple(c.key for c in sorted(triage, key=lambda c: c.key))
        return ReviewBatch(round=round_no, items=items, strategy=strategy)

    if strategy != "tag_stratified":
        raise ValidationError(f"unknown review strategy: {strategy!r}")

    passing = [c for c in in_round if c.nli_passed]
    by_tag: dict[str, list[TranslationCandidate]] = defaultdict(list)
    for cand in passing:
        problem = problems_by_id.get(cand.problem_id)
        if problem is None:
            continue
        for tag in set(problem.tags):
            by_tag[tag].append(cand)

    eligible = {t: len(cs) for t, cs in by_tag.items() if len(cs) > STRATIFIED_MIN_TAG_COUNT}
    if not eligible:
        warnings.warn(
            f"round {round_no}: no tag exceeds {STRATIFIED_MIN_TAG_COUNT} NLI-passing "
            "candidates; stratified batch is empty",
            stacklevel=2,
        )
        return ReviewBatch(round=round_no, items=(), strategy=strategy)

    ranked = sorted(eligible.items(), key=lambda kv: (-kv[1], kv[0]))
    quota_map = {
        tag: (TOP_TAG_QUOTA if rank < TOP_TAG_RANKS else OTHER_TAG_QUOTA)
        for rank, (tag, _) in enumerate(ranked)
    }
    rng = random.Random(seed)
    chosen: list[str] = []
    seen: set[str] = set()
    for tag, _ in ranked:
        bucket = sorted(by_tag[tag], key=lambda c: c.key)
        for cand in rng.sample(bucket, min(quota_map[tag], len(bucket))):
            if cand.key not in seen:
                seen.add(cand.key)
                chosen.append(cand.key)
    return ReviewBatch(round=round_no, items=tuple(chosen), strategy=strategy, quota_map=quota_map)


@dataclass(frozen=True)
class Label:
    candidate_key: str
    verdict: HumanVerdict
    modified_text: str | None = None
    note: str | None = None


@dataclass
class MergeReport:
    accepted: list[str] = field(default_factory=list)
    applied: list[str] = field(default_factory=list)
    rejected: list[tuple[str, str]] = field(default_factory=list)  # (key, reason)

    @property
    def delta(self) -> int:
        return len(self.accepted)


Checker = Callable[[str], CompileVerdict]


def merge_human_labels(
    store: Store,
    round_no: int,
    labels: Sequence[Label],
    checker: Checker | None = None,
) -> MergeReport:
    """Apply human verdicts to a round and update its manifest.

    Modified statements are recompiled first (via ``checker``) and rejected
    with diagnostics when the edit fails; labels for unknown candidates are
    rejected while the rest apply. The manifest's human_labels_added becomes
    the count of distinct accepted (correct or modified) candidates.
    """
    known = {c.key: c for c in store.load_round(round_no)}
    report = MergeReport()
    for label in labels:
        cand = known.get(label.candidate_key)
        if cand is None:
            report.rejected.append((label.candidate_key, "unknown candidate"))
            continue
        if label.verdict is HumanVerdict.MODIFIED:
            if not label.modified_text or label.modified_text == cand.statement_text:
                report.rejected.append(
                    (label.candidate_key, "modified verdict requires a distinct modified_text")
                )
                continue
            if checker is None:
                report.rejected.append(
                    (label.candidate_key, "no compile checker available to verify the edit")
                )
                continue
            verdict = checker(label.modified_text)
            if verdict.kind is not CompileKind.STATEMENT_PASS:
                diagnostics = "; ".join(m.text for m in verdict.messages[:3])
                report.rejected.append(
                    (label.candidate_key, f"modified statement failed recompile: {diagnostics}")
                )
                continue
        elif label.verdict is HumanVerdict.UNREVIEWED:
            report.rejected.append((label.candidate_key, "cannot merge an unreviewed label"))
            continue
        store.append_label(label.candidate_key, label.verdict, label.modified_text, label.note)
        report.applied.append(label.candidate_key)
        if label.verdict in (HumanVerdict.CORRECT, HumanVerdict.MODIFIED):
            report.accepted.append(label.candidate_key)

    manifest = store.load_manifest(round_no)
    manifest.human_labels_added = len(store.labeled_keys(round_no, accepted_only=True))
    store.write_manifest(manifest)
    return report
