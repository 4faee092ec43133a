"""Command-line surface for every pipeline stage.

Exit codes: 0 success, 1 validation, 2 environment/toolchain, 3 partial
failure (report path printed). Errors go to stderr as one JSON object.
All flags have FORGE_-prefixed environment-variable equivalents.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from mathforge.core.export import export_dataset, export_training_pairs
from mathforge.core.journal import encode_record
from mathforge.core.metrics import (
    compute_round_stats,
    expand_verdict_table,
    format_percent,
    pass_rate,
    weighted_accuracy,
)
from mathforge.core.store import Store
from mathforge.core.types import (
    HumanVerdict,
    Problem,
    SamplingConfig,
    WellDefined,
)
from mathforge.errors import ForgeError, ValidationError
from mathforge.fixtures import load_verdict_table
from mathforge.gateway.backends import Backend, MockBackend, RemoteBackend
from mathforge.gateway.ops import extract_problems, judge_well_defined
from mathforge.pipeline.imo import imo_mode
from mathforge.pipeline.prove import proof_search
from mathforge.pipeline.review import Label, merge_human_labels
from mathforge.pipeline.round import RoundConfig, StageBackends, run_round
from mathforge.pipeline.stages import TagAllowlist, filter_by_tags
from mathforge.repl.pool import PoolConfig, ReplPool, spawn_pool
from mathforge.statement.lint import apply_fixes, lint
from mathforge.statement.parser import normalize_statement, parse_statement

FAKE_REPL_CMD = (sys.executable, "-m", "mathforge.repl.fake_worker")


def _fail(exc: ForgeError) -> None:
    payload = {"code": type(exc).__name__, "message": str(exc), "details": None}
    click.echo(json.dumps(payload), err=True)
    sys.exit(exc.exit_code)


def forge_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ForgeError as exc:
            _fail(exc)

    return wrapper


@click.group(context_settings={"auto_envvar_prefix": "FORGE"})
def main() -> None:
    """forge: natural-language math problems to checked Lean 4 statements."""


# -- config plumbing ----------------------------------------------------------


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"config file not found: {path}")
    return json.loads(p.read_text(encoding="utf-8"))


def _backend_from(spec: dict | None, what: str) -> Backend:
    if not spec:
        raise ValidationError(f"config missing backend for {what}")
    kind = spec.get("kind")
    if kind == "mock":
        return MockBackend(spec["dir"])
    if kind == "http":
        return RemoteBackend(
            base_url=spec["base_url"],
            model=spec["model"],
            api_key_env=spec.get("api_key_env", "FORGE_API_KEY"),
            timeout_s=spec.get("timeout_s", 120.0),
            trace=spec.get("trace", False),
        )
    raise ValidationError(f"unknown backend kind {kind!r} for {what}")


def _pool_from(spec: dict | None) -> ReplPool:
    spec = spec or {}
    if spec.get("fake"):
        cmd: tuple[str, ...] = FAKE_REPL_CMD
    else:
        cmd = tuple(spec.get("cmd") or ())
    config = PoolConfig(
        workers=spec.get("workers", 2),
        timeout_s=spec.get("timeout_s", 60.0),
        proof_timeout_s=spec.get("proof_timeout_s", 120.0),
        max_jobs_per_worker=spec.get("max_jobs_per_worker", 200),
        env_tag=spec.get("env_tag", "Lean v4.8.0-rc1 with Mathlib4" if not spec.get("fake") else "fake-prover"),
        repl_cmd=cmd,
        init_cmd=spec.get("init_cmd", "import Mathlib"),
        init_timeout_s=spec.get("init_timeout_s", 600.0),
        lean_bin=spec.get("lean_bin"),
        record_dir=spec.get("record_dir"),
    )
    return spawn_pool(config)


def _stage_backends(config: dict) -> StageBackends:
    backends = config.get("backends", {})
    translator = _backend_from(backends.get("translator"), "translator")
    nli = _backend_from(backends.get("nli"), "nli")
    back = backends.get("back_translator")
    return StageBackends(
        translator=translator,
        nli_judge=nli,
        back_translator=_backend_from(back, "back_translator") if back else None,
    )


# -- ingest / filter ----------------------------------------------------------


@main.command()
@click.argument("post_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--config", "config_path", required=True, type=click.Path())
@forge_errors
def ingest(post_dir: str, store_path: str, config_path: str) -> None:
    """Extract problems from post files and judge well-definedness."""
    config = _load_config(config_path)
    backends = config.get("backends", {})
    extractor = _backend_from(backends.get("extractor"), "extractor")
    judge = _backend_from(backends.get("well_defined"), "well_defined")
    posts = sorted(Path(post_dir).glob("*.txt"))
    added = 0
    with Store(store_path, writer=True) as store:
        for post in posts:
            drafts = extract_problems(
                post.read_text(encoding="utf-8"), extractor, key=f"extract:{post.stem}"
            )
            for i, draft in enumerate(drafts):
                problem = Problem(
                    id=f"{post.stem}#{i}",
                    source=post.name,
                    nl_text=draft.nl_text,
                    answer=draft.answer,
                    tags=list(draft.tags),
                )
                verdict = judge_well_defined(
                    problem, judge, key=f"well_defined:{problem.id}"
                )
                problem.well_defined = (
                    WellDefined.POSITIVE
                    if verdict.value == "positive"
                    else WellDefined.NEGATIVE
                    if verdict.value == "negative"
                    else WellDefined.UNJUDGED
                )
                store.append_problem(problem)
                added += 1
    click.echo(f"ingested {added} problems from {len(posts)} posts")


@main.command("filter")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--tags", "tags_csv", default="", help="comma-separated allowlist override")
@forge_errors
def filter_cmd(store_path: str, tags_csv: str) -> None:
    """Report which stored problems survive the tag allowlist."""
    allowlist = (
        TagAllowlist(frozenset(t.strip() for t in tags_csv.split(",") if t.strip()))
        if tags_csv
        else TagAllowlist()
    )
    store = Store(store_path)
    problems = list(store.load_problems().values())
    positives = [p for p in problems if p.well_defined is WellDefined.POSITIVE]
    kept = filter_by_tags(positives, allowlist)
    click.echo(
        json.dumps(
            {
                "total": len(problems),
                "well_defined": len(positives),
                "tag_kept": len(kept),
                "kept_ids": [p.id for p in kept],
            }
        )
    )


# -- round --------------------------------------------------------------------


@main.group()
def round() -> None:
    """Active-learning round operations."""


@round.command("run")
@click.option("--config", "config_path", required=True, type=click.Path())
@forge_errors
def round_run(config_path: str) -> None:
    """Run a full round: translate, lint/fix, compile, back-translate, NLI."""
    config = _load_config(config_path)
    store_path = config.get("store")
    if not store_path:
        raise ValidationError("config missing 'store'")
    round_config = RoundConfig(
        round=config.get("round", 0),
        model_id=config.get("model_id", "unknown"),
        sampling=SamplingConfig(**config.get("sampling", {})),
        allowlist=TagAllowlist(frozenset(config["allowlist"]))
        if config.get("allowlist")
        else TagAllowlist(),
        seed=config.get("seed", 0),
        lint_autofix=config.get("lint_autofix", True),
    )
    backends = _stage_backends(config)
    repl_spec = dict(config.get("repl") or {})
    repl_spec.setdefault("timeout_s", round_config.sampling.timeout_s)
    pool = _pool_from(repl_spec)
    try:
        with Store(store_path, writer=True) as store:
            problems = list(store.load_problems().values())
            result = run_round(store, problems, pool, backends, round_config)
    finally:
        pool.shutdown()
    funnel_path = Path(store_path) / f"funnel-round-{round_config.round}.jsonl"
    funnel_path.write_text(
        encode_record(result.funnel.to_dict()) + "\n", encoding="utf-8"
    )
    click.echo(result.funnel.table(round_config.round, round_config.model_id))
    if result.failures:
        report_path = Path(store_path) / f"failures-round-{round_config.round}.json"
        report_path.write_text(
            json.dumps([vars(f) for f in result.failures], indent=2), encoding="utf-8"
        )
        click.echo(f"partial failure: {len(result.failures)} jobs; report at {report_path}")
        sys.exit(3)


# -- review / labels ----------------------------------------------------------


@main.group()
def review() -> None:
    """Human review server."""


@review.command("serve")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--round", "round_no", required=True, type=int)
@click.option("--port", default=8432, type=int)
@click.option("--strategy", default="pattern_triage",
              type=click.Choice(["pattern_triage", "tag_stratified"]))
@click.option("--seed", default=0, type=int)
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--ui", "ui_dir", default=None, type=click.Path())
@forge_errors
def review_serve(store_path, round_no, port, strategy, seed, config_path, ui_dir):
    """Serve the review queue and API for one round."""
    import uvicorn

    from mathforge.server.app import create_app

    config = _load_config(config_path) if config_path else {"repl": {"fake": True}}
    pool = _pool_from(config.get("repl"))
    store = Store(store_path, writer=True)

    def checker(text: str):
        normalized = normalize_statement(parse_statement(text))
        return pool.check_statement(normalized)

    app = create_app(store, checker, round_no, strategy=strategy, seed=seed, ui_dir=ui_dir)
    try:
        uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
    finally:
        store.close()
        pool.shutdown()


@main.group()
def labels() -> None:
    """Human label management."""


@labels.command("merge")
@click.argument("labels_file", type=click.Path(exists=True))
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--round", "round_no", required=True, type=int)
@click.option("--config", "config_path", default=None, type=click.Path())
@forge_errors
def labels_merge(labels_file, store_path, round_no, config_path):
    """Merge a JSONL file of human verdicts into a round."""
    entries = []
    for line in Path(labels_file).read_text(encoding="utf-8").splitlines():
        if line.strip():
            d = json.loads(line)
            entries.append(
                Label(
                    candidate_key=d["candidate_id"],
                    verdict=HumanVerdict(d["verdict"]),
                    modified_text=d.get("modified_text"),
                    note=d.get("note"),
                )
            )
    config = _load_config(config_path) if config_path else {}
    needs_pool = any(e.verdict is HumanVerdict.MODIFIED for e in entries)
    pool = _pool_from(config.get("repl")) if needs_pool else None

    def checker(text: str):
        return pool.check_statement(normalize_statement(parse_statement(text)))

    try:
        with Store(store_path, writer=True) as store:
            report = merge_human_labels(
                store, round_no, entries, checker=checker if pool else None
            )
    finally:
        if pool:
            pool.shutdown()
    click.echo(
        json.dumps(
            {
                "applied": len(report.applied),
                "accepted": report.delta,
                "rejected": report.rejected,
            }
        )
    )
    if report.rejected:
        sys.exit(3)


# -- export -------------------------------------------------------------------


@main.group()
def export() -> None:
    """Dataset export."""


@export.command("pairs")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--round", "round_no", required=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@forge_errors
def export_pairs(store_path, round_no, out_path):
    """Export accepted candidates as two-direction training pairs."""
    store = Store(store_path)
    candidates = [
        c for c in store.load_round(round_no)
        if c.human in (HumanVerdict.CORRECT, HumanVerdict.MODIFIED)
    ]
    count = export_training_pairs(candidates, store.load_problems(), out_path)
    click.echo(f"wrote {count} records to {out_path}")


@export.command("dataset")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--round", "round_no", required=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@forge_errors
def export_dataset_cmd(store_path, round_no, out_path):
    """Export the NLI-passing statement dataset for a round."""
    store = Store(store_path)
    count = export_dataset(store.load_round(round_no), store.load_problems(), out_path)
    click.echo(f"wrote {count} records to {out_path}")


# -- stats --------------------------------------------------------------------


@main.command()
@click.option("--round", "round_no", required=True, type=int)
@click.option("--store", "store_path", default=None, type=click.Path(exists=True))
@click.option("--verdict-table", "verdict_table", default=None, type=click.Path(),
              help="aggregated verdict rows; 'builtin' uses the shipped funnel fixture")
@forge_errors
def stats(round_no, store_path, verdict_table):
    """Print CPN/NPN and weighted accuracy for a round."""
    if verdict_table:
        rows = load_verdict_table(None if verdict_table == "builtin" else verdict_table)
        manifest = compute_round_stats(expand_verdict_table(rows, round_no=round_no))
        accuracy = None
    elif store_path:
        store = Store(store_path)
        manifest = store.load_manifest(round_no)
        reviewed_rows = _stats_rows(store, round_no)
        accuracy = weighted_accuracy(reviewed_rows) if reviewed_rows else None
    else:
        raise ValidationError("need --store or --verdict-table")
    click.echo(f"{'Round':<8}{'Translated':>12}{'CPN':>10}{'NPN':>10}")
    click.echo(
        f"{round_no:<8}{manifest.translated_count:>12}{manifest.cpn:>10}{manifest.npn:>10}"
    )
    if accuracy is not None:
        click.echo(f"weighted accuracy: {accuracy:.3f} ({format_percent(accuracy)})")


def _stats_rows(store: Store, round_no: int):
    from mathforge.server.app import _accuracy_rows

    return _accuracy_rows(store, store.load_problems(), round_no)


# -- imo / prove --------------------------------------------------------------


@main.command()
@click.argument("problems_file", type=click.Path(exists=True))
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--k", default=100, type=int)
@click.option("--temperature", default=0.7, type=float)
@forge_errors
def imo(problems_file, config_path, k, temperature):
    """Best-of-k mode: wide sampling, dedupe, compile and NLI filters."""
    config = _load_config(config_path)
    backends = _stage_backends(config)
    pool = _pool_from(config.get("repl"))
    try:
        for line in Path(problems_file).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            problem = Problem.from_dict(json.loads(line))
            survivors = imo_mode(problem, pool, backends, k=k, temperature=temperature)
            click.echo(
                json.dumps(
                    {
                        "problem_id": problem.id,
                        "survivors": [
                            {
                                "statement_text": s.statement_text,
                                "frequency": s.frequency,
                                "nli": s.nli.value,
                            }
                            for s in survivors
                        ],
                    },
                    ensure_ascii=False,
                )
            )
    finally:
        pool.shutdown()


@main.command()
@click.argument("candidates_file", type=click.Path(exists=True))
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--k", default=8, type=int)
@forge_errors
def prove(candidates_file, config_path, k):
    """Sample whole proofs for each statement and report pass@k."""
    config = _load_config(config_path)
    prover = _backend_from(config.get("backends", {}).get("prover"), "prover")
    pool = _pool_from(config.get("repl"))
    solved = 0
    total = 0
    try:
        for line in Path(candidates_file).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            statement = record["statement_text"]
            summary = proof_search(
                statement, k, prover, pool, key=f"prove:{record.get('problem_id', total)}"
            )
            total += 1
            solved += int(summary.solved)
            click.echo(
                json.dumps(
                    {
                        "statement_text": statement,
                        "solved": summary.solved,
                        "winning_index": summary.winning_index,
                        "attempts": summary.attempts,
                    },
                    ensure_ascii=False,
                )
            )
    finally:
        pool.shutdown()
    if total:
        result = pass_rate(solved, total, k)
        click.echo(f"pass@{k}: {solved}/{total} = {result.display}")


# -- lint / fix / repl ----------------------------------------------------------


@main.command("lint")
@click.argument("file", type=click.Path(exists=True))
@click.option("--nl", "nl_text", default=None, help="natural-language problem text")
@forge_errors
def lint_cmd(file, nl_text):
    """Emit lint findings as JSONL: {rule_id, span, severity, suggestion}."""
    text = Path(file).read_text(encoding="utf-8")
    for statement in _split_statements(text):
        report = lint(statement, nl_text)
        for finding in report.findings:
            click.echo(json.dumps(finding.to_dict(), ensure_ascii=False))


@main.command("fix")
@click.argument("file", type=click.Path(exists=True))
@click.option("--nl", "nl_text", default=None)
@forge_errors
def fix_cmd(file, nl_text):
    """Apply every fixable lint suggestion; write fixed text to stdout."""
    text = Path(file).read_text(encoding="utf-8")
    pieces = _split_statements(text)
    fixed = [apply_fixes(s, lint(s, nl_text)) for s in pieces]
    sys.stdout.write("\n---\n".join(fixed) + ("\n" if text.endswith("\n") else ""))


def _split_statements(text: str) -> list[str]:
    if "\n---\n" in text:
        return [s.strip() for s in text.split("\n---\n") if s.strip()]
    return [text.strip()]


@main.group()
def repl() -> None:
    """Direct prover REPL operations."""


@repl.command("check")
@click.argument("file", type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--record-fixtures", "record_dir", default=None, type=click.Path(),
              help="dump raw REPL responses for offline classification tests")
@forge_errors
def repl_check(file, config_path, record_dir):
    """One-off statement check through the pool."""
    config = _load_config(config_path) if config_path else {"repl": {"fake": True}}
    if record_dir:
        config.setdefault("repl", {})["record_dir"] = record_dir
    pool = _pool_from(config.get("repl"))
    try:
        text = Path(file).read_text(encoding="utf-8")
        normalized = normalize_statement(parse_statement(text))
        verdict = pool.check_statement(normalized)
    finally:
        pool.shutdown()
    click.echo(json.dumps(verdict.to_dict(), ensure_ascii=False))
    if verdict.kind.value != "statement_pass":
        sys.exit(1)


if __name__ == "__main__":
    main()
