"""The shipped demo must stay runnable: ingest, round, review queue shape."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from mathforge.cli import main

DEMO = Path(__file__).resolve().parent.parent / "demo"


@pytest.fixture
def demo_store(tmp_path):
    config = json.loads((DEMO / "round.json").read_text(encoding="utf-8"))
    config["store"] = str(tmp_path / "store")
    config["backends"] = {
        name: {"kind": "mock", "dir": str(DEMO / "mock")}
        for name in config["backends"]
    }
    config_path = tmp_path / "round.json"
    config_path.write_text(json.dumps(config), encoding="utf-8")
    return config_path, config["store"]


def test_demo_pipeline_end_to_end(demo_store):
    config_path, store_path = demo_store
    runner = CliRunner()

    ingest = runner.invoke(
        main, ["ingest", str(DEMO / "posts"), "--store", store_path, "--config", str(config_path)]
    )
    assert ingest.exit_code == 0, ingest.output
    assert "ingested 6 problems from 4 posts" in ingest.output

    round_run = runner.invoke(main, ["round", "run", "--config", str(config_path)])
    assert round_run.exit_code == 0, round_run.output

    from mathforge.core.store import Store

    store = Store(store_path)
    manifest = store.load_manifest(1)
    assert manifest.translated_count == 4
    assert manifest.cpn == 3
    assert manifest.npn == 2

    from mathforge.core.types import Verdict
    from mathforge.pipeline.review import enqueue_review

    batch = enqueue_review(store.load_round(1), store.load_problems(), 1)
    assert len(batch.items) == 2  # one NLI failure, one untranslatable
    kinds = {
        c.key: (c.compiles, c.nli)
        for c in store.load_round(1)
        if c.key in batch.items
    }
    assert any(compiled and nli is Verdict.NEGATIVE for compiled, nli in kinds.values())
    assert any(not compiled for compiled, nli in kinds.values())
