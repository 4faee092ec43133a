"""Full round orchestration: translate, lint/fix, compile-check, NLI, journal.

A round is resumable: each candidate is journaled only once its whole verdict
chain is known, keyed on (problem_id, round, sample_index), so re-running
after a crash skips completed work and converges to the same manifest.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable

from mathforge.core.metrics import compute_round_stats
from mathforge.core.store import Store
from mathforge.core.types import (
    Problem,
    RoundManifest,
    SamplingConfig,
    TranslationCandidate,
    Verdict,
    WellDefined,
)
from mathforge.errors import ParseError, PoolError, TransportError
from mathforge.gateway.backends import Backend
from mathforge.gateway.ops import back_translate, judge_nli, translate
from mathforge.gateway.prompts import registry_digest
from mathforge.pipeline.stages import TagAllowlist, filter_by_tags, rephrase_answer
from mathforge.statement.fingerprint import canonical_fingerprint
from mathforge.statement.lint import apply_fixes, lint
from mathforge.statement.parser import normalize_statement, parse_statement


@dataclass(frozen=True)
class RoundConfig:
    round: int
    model_id: str = "unknown"
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    allowlist: TagAllowlist = field(default_factory=TagAllowlist)
    seed: int = 0
    lint_autofix: bool = True

    def digest(self) -> str:
        payload = {
            "round": self.round,
            "model_id": self.model_id,
            "sampling": self.sampling.to_dict(),
            "allowlist": sorted(self.allowlist.tags),
            "seed": self.seed,
            "lint_autofix": self.lint_autofix,
            "prompts": registry_digest(),
        }
        return hashlib.sha256(
            json.dumps(payload, sort_keys=True).encode("utf-8")
        ).hexdigest()


@dataclass(frozen=True)
class StageBackends:
    """Per-stage backends; each stage is independently configurable."""

    translator: Backend
    nli_judge: Backend
    back_translator: Backend | None = None  # defaults to the translator

    @property
    def back(self) -> Backend:
        return self.back_translator or self.translator


@dataclass
class FunnelReport:
    """Stage survivor counts; monotone non-increasing through the filters."""

    extracted: int = 0
    well_defined: int = 0
    tag_kept: int = 0
    translated: int = 0
    cpn: int = 0
    npn: int = 0

    def monotone(self) -> bool:
        """Shape check for single-sample rounds, where problems and candidates
        correspond one-to-one; with n_samples > 1 the candidate counts can
        legitimately exceed the problem counts."""
        return self.extracted >= self.well_defined >= self.tag_kept >= self.cpn >= self.npn

    def to_dict(self) -> dict:
        return {
            "extracted": self.extracted,
            "well_defined": self.well_defined,
            "tag_kept": self.tag_kept,
            "translated": self.translated,
            "cpn": self.cpn,
            "npn": self.npn,
        }

    def table(self, round_no: int, model_id: str) -> str:
        """Human-readable funnel table with dataset / CPN / NPN columns."""
        header = f"{'Stage':<22}{'Count':>10}"
        rows = [
            ("extracted", self.extracted),
            ("well-defined", self.well_defined),
            ("tag-kept", self.tag_kept),
            ("translated", self.translated),
            ("compile pass (CPN)", self.cpn),
            ("NLI pass (NPN)", self.npn),
        ]
        body = "\n".join(f"{name:<22}{count:>10}" for name, count in rows)
        footer = (
            f"{'Round':<10}{'Model':<30}{'CPN':>10}{'NPN':>10}\n"
            f"{round_no:<10}{model_id:<30}{self.cpn:>10}{self.npn:>10}"
        )
        return f"{header}\n{body}\n\n{footer}"


@dataclass
class StageFailure:
    problem_id: str
    sample_index: int
    stage: str
    error: str
    retryable: bool = True


@dataclass
class RoundResult:
    manifest: RoundManifest
    funnel: FunnelReport
    failures: list[StageFailure] = field(default_factory=list)


def run_round(
    store: Store,
    problems: Iterable[Problem],
    pool,
    backends: StageBackends,
    config: RoundConfig,
) -> RoundResult:
    """Run one active-learning round over the given problem universe.

    ``pool`` is anything with a ``check_statement(text) -> CompileVerdict``
    method. Deterministic under a mock backend and fixed seed: reruns (even
    after a crash) produce byte-identical manifests.
    """
    universe = sorted(problems, key=lambda p: p.id)
    positives = [p for p in universe if p.well_defined is WellDefined.POSITIVE]
    kept = filter_by_tags(positives, config.allowlist)
    kept = [rephrase_answer(p) for p in kept]

    failures: list[StageFailure] = []
    n = config.sampling.n_samples
    for problem in kept:
        pending = [
            s for s in range(n) if not store.has_candidate(problem.id, config.round, s)
        ]
        if not pending:
            continue
        try:
            raw_texts = translate(
                problem,
                n,
                config.sampling.temperature,
                backends.translator,
                key=f"nl2fl:{problem.id}",
            )
        except (TransportError, PoolError) as exc:
            failures.append(StageFailure(problem.id, -1, "translate", str(exc)))
            continue
        for sample_index in pending:
            try:
                candidate = _process_sample(
                    store, problem, sample_index, raw_texts[sample_index], pool, backends, config
                )
                store.append_candidate(candidate)
            except (TransportError, PoolError) as exc:
                failures.append(
                    StageFailure(problem.id, sample_index, "verdict-chain", str(exc))
                )

    round_candidates = store.load_round(config.round)
    problems_by_id = {p.id: p for p in kept}
    manifest = compute_round_stats(
        round_candidates, problems_by_id, round_no=config.round
    )
    manifest.model_id = config.model_id
    manifest.config_digest = config.digest()
    manifest.human_labels_added = len(
        store.labeled_keys(config.round, accepted_only=True)
    )
    store.write_manifest(manifest)

    funnel = FunnelReport(
        extracted=len(universe),
        well_defined=len(positives),
        tag_kept=len(kept),
        translated=manifest.translated_count,
        cpn=manifest.cpn,
        npn=manifest.npn,
    )
    return RoundResult(manifest=manifest, funnel=funnel, failures=failures)


def _process_sample(
    store: Store,
    problem: Problem,
    sample_index: int,
    raw_text: str,
    pool,
    backends: StageBackends,
    config: RoundConfig,
) -> TranslationCandidate:
    store.append_raw(problem.id, config.round, sample_index, raw_text)

    # Fixes run on the raw text: normalization re-spaces tokens, which would
    # erase adjacency signals like the implicit-multiplication pattern.
    statement_text = raw_text.strip()
    parse_ok = True
    try:
        parse_statement(statement_text)
    except ParseError:
        parse_ok = False
    if parse_ok and config.lint_autofix:
        report = lint(statement_text, nl_text=problem.nl_text)
        if report.fixable:
            statement_text = apply_fixes(statement_text, report)
    if parse_ok:
        statement_text = normalize_statement(
            parse_statement(statement_text),
            f"lean_workbook_{_name_suffix(problem.id, sample_index)}",
        )
    report = lint(statement_text, nl_text=problem.nl_text)

    compile_verdict = None
    nli = Verdict.INDETERMINATE
    back_nl = None
    if parse_ok:
        compile_verdict = pool.check_statement(statement_text)
        if compile_verdict.kind.value == "statement_pass":
            back_nl = back_translate(
                statement_text,
                backends.back,
                key=f"fl2nl:{problem.id}:{sample_index}",
            )
            tri = judge_nli(
                problem.nl_text,
                back_nl,
                backends.nli_judge,
                key=f"nli:{problem.id}:{sample_index}",
            )
            nli = Verdict(tri.value)

    return TranslationCandidate(
        problem_id=problem.id,
        round=config.round,
        sample_index=sample_index,
        statement_text=statement_text,
        lint=report,
        compile=compile_verdict,
        back_translation=back_nl,
        nli=nli,
        fingerprint=canonical_fingerprint(statement_text),
    )


def _name_suffix(problem_id: str, sample_index: int) -> str:
    digest = hashlib.sha256(f"{problem_id}:{sample_index}".encode()).hexdigest()[:8]
    return f"{digest}_{sample_index}"
