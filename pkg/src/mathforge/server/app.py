"""Review server: queue, live compile checks, verdict persistence, stats.

Single-round scope, synchronous handlers. Every mutation goes through the
store's label journal, so a killed server loses nothing; the live check path
never writes. Static UI assets, when built, are served from / with the API
under /api.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from mathforge.core.metrics import weighted_accuracy
from mathforge.core.store import Store
from mathforge.core.types import HumanVerdict, Problem, TranslationCandidate
from mathforge.errors import PoolSaturatedError, ValidationError
from mathforge.pipeline.review import Label, enqueue_review, merge_human_labels
from mathforge.repl.verdict import CompileVerdict


class CheckRequest(BaseModel):
    statement_text: str = Field(min_length=1)


class VerdictSubmission(BaseModel):
    candidate_id: str = Field(min_length=1)
    verdict: str
    modified_text: str | None = None
    note: str | None = None


def _error(status: int, code: str, message: str, details=None, headers=None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details},
        headers=headers,
    )


def create_app(
    store: Store,
    checker: Callable[[str], CompileVerdict],
    round_no: int,
    strategy: str = "pattern_triage",
    seed: int = 0,
    ui_dir: Path | str | None = None,
) -> FastAPI:
    app = FastAPI(title="forge review", docs_url=None, redoc_url=None)
    problems = store.load_problems()

    def pending_queue() -> list[TranslationCandidate]:
        candidates = {c.key: c for c in store.load_round(round_no)}
        batch = enqueue_review(
            list(candidates.values()), problems, round_no, strategy=strategy, seed=seed
        )
        return [
            candidates[key]
            for key in batch.items
            if candidates[key].human is HumanVerdict.UNREVIEWED
        ]

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        fields = [
            {"field": ".".join(str(p) for p in e["loc"]), "message": e["msg"]}
            for e in exc.errors()
        ]
        return _error(400, "malformed_request", "request body failed validation", fields)

    @app.get("/api/queue")
    def get_queue(round: int = round_no):
        if round != round_no:
            return _error(404, "unknown_round", f"server is scoped to round {round_no}")
        items = []
        for cand in pending_queue():
            problem = problems.get(cand.problem_id)
            items.append(
                {
                    "candidate": cand.to_dict(),
                    "problem": problem.to_dict() if problem else None,
                    "lint": cand.lint.to_dict(),
                    "compile": cand.compile.to_dict() if cand.compile else None,
                    "back_translation": cand.back_translation,
                    "nli": cand.nli.value,
                }
            )
        return items

    @app.post("/api/check")
    def post_check(body: CheckRequest):
        try:
            verdict = checker(body.statement_text)
        except PoolSaturatedError:
            return _error(
                503, "pool_saturated", "compile pool is at capacity",
                headers={"Retry-After": "2"},
            )
        except ValidationError as exc:
            return _error(400, "invalid_statement", str(exc))
        return verdict.to_dict()

    @app.post("/api/verdict")
    def post_verdict(body: VerdictSubmission):
        try:
            verdict = HumanVerdict(body.verdict)
        except ValueError:
            return _error(400, "malformed_request", f"unknown verdict {body.verdict!r}")
        if verdict is HumanVerdict.UNREVIEWED:
            return _error(400, "malformed_request", "cannot submit an unreviewed verdict")
        if verdict is HumanVerdict.MODIFIED and not body.modified_text:
            return _error(
                400, "malformed_request", "modified verdict requires modified_text",
                [{"field": "modified_text", "message": "required for modified"}],
            )
        label = Label(body.candidate_id, verdict, body.modified_text, body.note)
        try:
            report = merge_human_labels(store, round_no, [label], checker=checker)
        except PoolSaturatedError:
            return _error(
                503, "pool_saturated", "compile pool is at capacity",
                headers={"Retry-After": "2"},
            )
        if report.rejected:
            key, reason = report.rejected[0]
            if "unknown candidate" in reason:
                return _error(404, "unknown_candidate", reason)
            return _error(422, "rejected", reason, {"candidate_id": key})
        remaining = [c.key for c in pending_queue()]
        return {
            "ok": True,
            "stored": report.applied[0],
            "next": remaining[0] if remaining else None,
            "remaining": len(remaining),
        }

    @app.get("/api/stats")
    def get_stats(round: int = round_no):
        if round != round_no:
            return _error(404, "unknown_round", f"server is scoped to round {round_no}")
        try:
            manifest = store.load_manifest(round_no).to_dict()
        except ValidationError:
            manifest = None
        rows = _accuracy_rows(store, problems, round_no)
        value = weighted_accuracy(rows) if rows else None
        return {
            "manifest": manifest,
            "rows": [list(r) for r in rows],
            "weighted_accuracy": value,
        }

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _accuracy_rows(
    store: Store, problems: dict[str, Problem], round_no: int
) -> list[tuple[str, int, int, int]]:
    """Per-tag sampled accuracy over reviewed candidates, accuracy-table shaped.

    count is the tag's NLI-pass population (manifest per-tag count when
    available); correct counts reviews whose original statement stood
    unchanged. Modified and rejected statements were wrong translations.
    """
    reviewed = [
        c for c in store.load_round(round_no) if c.human is not HumanVerdict.UNREVIEWED
    ]
    if not reviewed:
        return []
    try:
        per_tag_population = store.load_manifest(round_no).per_tag_counts
    except ValidationError:
        per_tag_population = {}
    sampled: dict[str, list[bool]] = {}
    for cand in reviewed:
        problem = problems.get(cand.problem_id)
        if problem is None:
            continue
        for tag in set(problem.tags):
            sampled.setdefault(tag, []).append(cand.human is HumanVerdict.CORRECT)
    rows = []
    for tag in sorted(sampled, key=lambda t: (-per_tag_population.get(t, 0), t)):
        outcomes = sampled[tag]
        rows.append(
            (
                tag,
                per_tag_population.get(tag, len(outcomes)),
                sum(outcomes),
                len(outcomes),
            )
        )
    return rows
