from __future__ import annotations

import pytest

import mockworld
from mathforge.core.store import Store
from mathforge.core.types import (
    HumanVerdict,
    Problem,
    SamplingConfig,
    TranslationCandidate,
    Verdict,
    WellDefined,
)
from mathforge.errors import ValidationError
from mathforge.gateway.backends import ScriptedBackend
from mathforge.pipeline import (
    DEFAULT_ALLOWLIST,
    RoundConfig,
    StageBackends,
    TagAllowlist,
    enqueue_review,
    filter_by_tags,
    imo_mode,
    merge_human_labels,
    proof_search,
    rephrase_answer,
    run_round,
)
from mathforge.pipeline.review import Label
from mathforge.repl.verdict import CompileKind, CompileVerdict


def _problem(pid="p1", tags=("inequality",), answer=None, wd=WellDefined.POSITIVE):
    return Problem(
        id=pid, source="s", nl_text="Compute 2+3.", answer=answer,
        tags=list(tags), well_defined=wd,
    )


# -- stages -------------------------------------------------------------------


def test_default_allowlist_matches_catalog():
    assert DEFAULT_ALLOWLIST.tags == frozenset(
        {
            "inequality", "number_theory", "trigonometry", "modular_arithmetic",
            "induction", "functional_equation", "complex_numbers", "polynomial",
        }
    )


def test_filter_by_tags():
    kept = filter_by_tags(
        [
            _problem("a", tags=("inequality",)),
            _problem("b", tags=("geometry",)),
            _problem("c", tags=()),
            _problem("d", tags=("geometry", "number theory")),
        ]
    )
    assert [p.id for p in kept] == ["a", "d"]


def test_empty_allowlist_rejected():
    with pytest.raises(ValidationError):
        TagAllowlist(tags=frozenset())


def test_rephrase_answer_appends_once():
    p = _problem(answer="5")
    once = rephrase_answer(p)
    assert once.nl_text == "Compute 2+3. Show that it is 5."
    twice = rephrase_answer(once)
    assert twice.nl_text == once.nl_text


def test_rephrase_proof_problem_unchanged():
    p = _problem(answer=None)
    assert rephrase_answer(p) is p


# -- run_round ----------------------------------------------------------------


def _round_config(round_no=1) -> RoundConfig:
    return RoundConfig(
        round=round_no,
        model_id="mock-model",
        sampling=SamplingConfig(n_samples=1, temperature=0.0, timeout_s=5.0),
        allowlist=TagAllowlist(),
        seed=7,
    )


def test_round_funnel_shape(tmp_path, fake_pool):
    with Store(tmp_path / "store", writer=True) as store:
        result = run_round(
            store, mockworld.make_problems(), fake_pool, mockworld.make_backends(),
            _round_config(),
        )
    funnel = result.funnel
    assert funnel.extracted == mockworld.N_PROBLEMS
    assert funnel.well_defined == mockworld.EXPECT_WELL_DEFINED
    assert funnel.tag_kept == mockworld.EXPECT_TAG_KEPT
    assert funnel.cpn == mockworld.EXPECT_CPN
    assert funnel.npn == mockworld.EXPECT_NPN
    assert funnel.monotone()
    assert not result.failures
    assert result.manifest.config_digest


def test_round_empty_universe(tmp_path, fake_pool):
    with Store(tmp_path / "store", writer=True) as store:
        result = run_round(store, [], fake_pool, mockworld.make_backends(), _round_config())
    assert result.manifest.translated_count == 0
    assert result.funnel.monotone()


def test_round_candidates_never_reach_nli_without_statement_pass(tmp_path, fake_pool):
    with Store(tmp_path / "store", writer=True) as store:
        run_round(store, mockworld.make_problems(), fake_pool, mockworld.make_backends(),
                  _round_config())
        for cand in store.load_round(1):
            if cand.nli is not Verdict.INDETERMINATE:
                assert cand.compiles
            if cand.back_translation is not None:
                assert cand.compiles


def test_round_rerun_is_identical_and_resume_equivalent(tmp_path, fake_pool):
    config = _round_config()
    problems = mockworld.make_problems()

    with Store(tmp_path / "full", writer=True) as store:
        run_round(store, problems, fake_pool, mockworld.make_backends(), config)
        baseline = store.manifest_path(1).read_bytes()

    class CrashAfter:
        def __init__(self, pool, limit):
            self.pool, self.limit, self.calls = pool, limit, 0

        def check_statement(self, text):
            if self.calls >= self.limit:
                raise KeyboardInterrupt("injected crash")
            self.calls += 1
            return self.pool.check_statement(text)

    with Store(tmp_path / "crashed", writer=True) as store:
        with pytest.raises(KeyboardInterrupt):
            run_round(
                store, problems, CrashAfter(fake_pool, 13),
                mockworld.make_backends(), config,
            )
        done_after_crash = len(store.load_round(1))
        assert 0 < done_after_crash < mockworld.EXPECT_TAG_KEPT
    with Store(tmp_path / "crashed", writer=True) as store:
        run_round(store, problems, fake_pool, mockworld.make_backends(), config)
        resumed = store.manifest_path(1).read_bytes()
        assert len(store.load_round(1)) == mockworld.EXPECT_TAG_KEPT

    assert resumed == baseline  # byte-identical manifests


def test_round_transport_failure_is_partial_not_fatal(tmp_path, fake_pool):
    from mathforge.errors import TransportError

    def flaky_nli(prompt, key, n):
        pid = key.split(":")[1]
        if pid.endswith("2"):
            raise TransportError("nli backend down")
        return ["**same**"]

    backends = mockworld.make_backends()
    flaky = StageBackends(
        translator=backends.translator,
        nli_judge=ScriptedBackend(flaky_nli),
        back_translator=backends.back_translator,
    )
    problems = [
        _problem("q1", tags=("inequality",)),
        _problem("q2", tags=("inequality",)),
    ]

    def translator(prompt, key, n):
        return ["theorem q (x : ℕ) : x = x := by sorry"] * n

    flaky = StageBackends(
        translator=ScriptedBackend(translator),
        nli_judge=ScriptedBackend(flaky_nli),
        back_translator=ScriptedBackend(lambda p, k, n: ["restated"]),
    )
    with Store(tmp_path / "store", writer=True) as store:
        result = run_round(store, problems, fake_pool, flaky, _round_config())
    assert len(result.failures) == 1
    assert result.failures[0].problem_id == "q2"
    assert result.manifest.translated_count == 1  # failed job left for a rerun


def test_round_fixes_run_before_normalization(tmp_path, fake_pool):
    """Implicit multiplication is only detectable on the raw text; the fix
    must land before token re-spacing erases the adjacency."""
    raw = "theorem pre_norm (a b : ℝ) (ha : 0 <= a) (hb : 0 <= b) : 2a+3b >= 0 := by sorry"
    backends = StageBackends(
        translator=ScriptedBackend(lambda p, k, n: [raw] * n),
        nli_judge=ScriptedBackend(lambda p, k, n: ["**same**"]),
        back_translator=ScriptedBackend(lambda p, k, n: ["restated"]),
    )
    with Store(tmp_path / "store", writer=True) as store:
        result = run_round(
            store, [_problem("pn1", tags=("inequality",))], fake_pool, backends,
            _round_config(),
        )
        (cand,) = store.load_round(1)
    assert "2 * a + 3 * b" in cand.statement_text
    assert cand.compiles
    assert not cand.lint.fixable
    assert result.manifest.cpn == 1


# -- review -------------------------------------------------------------------


def _mk_candidate(pid, idx, *, compiled=True, nli=Verdict.POSITIVE, round_no=1):
    return TranslationCandidate(
        problem_id=pid,
        round=round_no,
        sample_index=idx,
        statement_text="theorem t (x : ℕ) : x = x := by sorry",
        compile=CompileVerdict(
            kind=CompileKind.STATEMENT_PASS if compiled else CompileKind.ERROR
        ),
        nli=nli if compiled else Verdict.INDETERMINATE,
        fingerprint="st:x",
    )


def test_pattern_triage_selects_failures():
    cands = [
        _mk_candidate("a", 0, compiled=False),
        _mk_candidate("b", 0, compiled=True, nli=Verdict.NEGATIVE),
        _mk_candidate("c", 0, compiled=True, nli=Verdict.POSITIVE),
    ]
    batch = enqueue_review(cands, {}, 1, strategy="pattern_triage")
    assert batch.items == ("a/1/0", "b/1/0")


def test_pattern_triage_empty_when_all_pass():
    cands = [_mk_candidate("a", 0), _mk_candidate("b", 0)]
    batch = enqueue_review(cands, {}, 1, strategy="pattern_triage")
    assert batch.items == ()


def test_tag_stratified_quotas_and_determinism():
    problems = {}
    cands = []
    spec = [("inequality", 150), ("algebra", 140), ("number_theory", 130),
            ("equation", 120), ("limit", 50)]
    serial = 0
    for tag, count in spec:
        for _ in range(count):
            pid = f"{tag}-{serial}"
            problems[pid] = Problem(id=pid, source="s", nl_text="x", tags=[tag])
            cands.append(_mk_candidate(pid, 0))
            serial += 1
    batch = enqueue_review(cands, problems, 1, strategy="tag_stratified", seed=42)
    assert batch.quota_map == {
        "inequality": 10, "algebra": 10, "number_theory": 10, "equation": 5,
    }
    assert len(batch.items) == 35
    again = enqueue_review(cands, problems, 1, strategy="tag_stratified", seed=42)
    assert again.items == batch.items
    different_seed = enqueue_review(cands, problems, 1, strategy="tag_stratified", seed=43)
    assert different_seed.items != batch.items


def test_tag_stratified_warns_when_no_tag_is_common():
    problems = {"a": Problem(id="a", source="s", nl_text="x", tags=["rare"])}
    with pytest.warns(UserWarning, match="no tag exceeds"):
        batch = enqueue_review([_mk_candidate("a", 0)], problems, 1, strategy="tag_stratified")
    assert batch.items == ()


def _seed_store_for_labels(root, fake_pool):
    store = Store(root, writer=True)
    problems = [
        _problem("q1", tags=("inequality",)),
        _problem("q2", tags=("inequality",)),
        _problem("q3", tags=("inequality",)),
    ]

    def translator(prompt, key, n):
        pid = key.split(":")[1]
        return [f"theorem thm_{pid} (x : ℕ) : x = x := by sorry"] * n

    backends = StageBackends(
        translator=ScriptedBackend(translator),
        nli_judge=ScriptedBackend(lambda p, k, n: ["**same**"]),
        back_translator=ScriptedBackend(lambda p, k, n: ["restated"]),
    )
    run_round(store, problems, fake_pool, backends, _round_config())
    return store


def test_merge_labels_counts_and_rejections(tmp_path, fake_pool):
    store = _seed_store_for_labels(tmp_path / "store", fake_pool)
    keys = [c.key for c in store.load_round(1)]
    labels = [
        Label(keys[0], HumanVerdict.CORRECT),
        Label(
            keys[1],
            HumanVerdict.MODIFIED,
            modified_text="theorem thm_q2 (x : ℕ) : x + 0 = x := by sorry",
        ),
        Label(keys[2], HumanVerdict.REJECTED),
        Label("ghost/1/0", HumanVerdict.CORRECT),
    ]
    report = merge_human_labels(store, 1, labels, checker=fake_pool.check_statement)
    assert report.delta == 2  # correct + modified feed training
    assert len(report.applied) == 3  # rejected verdict still recorded
    assert ("ghost/1/0", "unknown candidate") in report.rejected
    assert store.load_manifest(1).human_labels_added == 2
    store.close()


def test_merge_modified_failing_recompile_rejected(tmp_path, fake_pool):
    store = _seed_store_for_labels(tmp_path / "store", fake_pool)
    key = store.load_round(1)[0].key
    label = Label(
        key,
        HumanVerdict.MODIFIED,
        modified_text="theorem bad (FAKE_ERROR : ℕ) : 0 = 1 := by sorry",
    )
    report = merge_human_labels(store, 1, [label], checker=fake_pool.check_statement)
    assert report.delta == 0
    assert "failed recompile" in report.rejected[0][1]
    (cand,) = [c for c in store.load_round(1) if c.key == key]
    assert cand.human is HumanVerdict.UNREVIEWED
    store.close()


def test_merge_zero_labels(tmp_path, fake_pool):
    store = _seed_store_for_labels(tmp_path / "store", fake_pool)
    report = merge_human_labels(store, 1, [], checker=fake_pool.check_statement)
    assert report.delta == 0
    store.close()


# -- imo mode -----------------------------------------------------------------

IMO_GOOD = "theorem imo_ok (x : ℕ) (h : 0 < x) : 1 ≤ x := by sorry"
IMO_BAD_COMPILE = "theorem imo_bad (FAKE_ERROR : ℕ) : 0 = 1 := by sorry"
IMO_NLI_FAIL = "theorem imo_off (x : ℕ) (h : 0 < x) : 2 ≤ x + 1 := by sorry"


def _imo_backends():
    def translator(prompt, key, n):
        # 100 samples collapsing to 3 distinct statements: 60/25/15
        return ([IMO_GOOD] * 60 + [IMO_NLI_FAIL] * 25 + [IMO_BAD_COMPILE] * 15)[:n]

    def nli_by_key(prompt, key, n):
        return ["**same**"] if "Problem 2: good" in prompt else ["**different**"]

    def back(prompt, key, n):
        return ["good" if "imo_ok" in prompt else "off-goal"]

    return StageBackends(
        translator=ScriptedBackend(translator),
        nli_judge=ScriptedBackend(nli_by_key),
        back_translator=ScriptedBackend(back),
    )


def test_imo_mode_single_survivor(fake_pool):
    problem = _problem("imo-1", tags=("inequality",))
    survivors = imo_mode(problem, fake_pool, _imo_backends(), k=100, temperature=0.7)
    assert len(survivors) == 1
    (winner,) = survivors
    assert "imo_ok" in winner.statement_text or winner.frequency == 60
    assert winner.frequency == 60
    assert winner.nli is Verdict.POSITIVE


def test_imo_mode_k1(fake_pool):
    problem = _problem("imo-2", tags=("inequality",))
    survivors = imo_mode(problem, fake_pool, _imo_backends(), k=1)
    assert len(survivors) == 1


def test_imo_mode_zero_survivors(fake_pool):
    backends = StageBackends(
        translator=ScriptedBackend(lambda p, k, n: [IMO_BAD_COMPILE] * n),
        nli_judge=ScriptedBackend(lambda p, k, n: ["**same**"]),
        back_translator=ScriptedBackend(lambda p, k, n: ["x"]),
    )
    assert imo_mode(_problem("imo-3"), fake_pool, backends, k=10) == []


def test_imo_mode_invalid_k(fake_pool):
    with pytest.raises(ValidationError):
        imo_mode(_problem(), fake_pool, _imo_backends(), k=0)


# -- proof search -------------------------------------------------------------


class CountingPool:
    def __init__(self, pool):
        self.pool = pool
        self.calls = 0

    def check_proof(self, statement, proof):
        self.calls += 1
        return self.pool.check_proof(statement, proof)


def test_proof_search_early_stop(fake_pool):
    proofs = ["by FAKE_ERROR", "by FAKE_ERROR", "by rfl", "by rfl, done", "by simp"]
    backend = ScriptedBackend(lambda p, k, n: proofs[:n])
    counting = CountingPool(fake_pool)
    summary = proof_search(
        "theorem t (x : ℕ) : x = x := by sorry", 8, backend, counting
    )
    assert summary.solved is True
    assert summary.winning_index == 3
    assert counting.calls == 3  # early stop: exactly winning-index checks
    assert summary.failure_kinds == {"error": 2}


def test_proof_search_zero_k(fake_pool):
    backend = ScriptedBackend(lambda p, k, n: ["by rfl"])
    summary = proof_search("theorem t : True := by sorry", 0, backend, fake_pool)
    assert summary.solved is False
    assert summary.attempts == 0


def test_proof_search_exhausts_budget(fake_pool):
    backend = ScriptedBackend(lambda p, k, n: ["by FAKE_ERROR"] * n)
    summary = proof_search("theorem t : True := by sorry", 5, backend, fake_pool)
    assert summary.solved is False
    assert summary.attempts == 5
    assert summary.failure_kinds["error"] == 5
