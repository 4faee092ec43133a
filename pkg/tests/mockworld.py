"""Deterministic 50-problem mock world for round/funnel tests.

Funnel shape by construction:
  extracted 50 -> well-defined 40 -> tag-kept 30 -> translated 30
  -> compile pass 24 (3 scripted prover errors, 3 unparseable translations)
  -> NLI pass 18 (6 scripted **different** responses)
"""

from __future__ import annotations

from mathforge.core.types import Problem, WellDefined
from mathforge.gateway.backends import ScriptedBackend
from mathforge.pipeline.round import StageBackends

N_PROBLEMS = 50
EXPECT_WELL_DEFINED = 40
EXPECT_TAG_KEPT = 30
EXPECT_CPN = 24
EXPECT_NPN = 18

_ALLOWED = ["inequality", "number_theory", "trigonometry", "induction"]


def make_problems() -> list[Problem]:
    problems = []
    for i in range(N_PROBLEMS):
        pid = f"prob-{i:03d}"
        if i >= EXPECT_WELL_DEFINED:
            status = WellDefined.NEGATIVE if i % 2 else WellDefined.UNJUDGED
            tags = [_ALLOWED[i % len(_ALLOWED)]]
        elif i >= EXPECT_TAG_KEPT:
            status = WellDefined.POSITIVE
            tags = ["geometry"]  # outside the allowlist
        else:
            status = WellDefined.POSITIVE
            tags = [_ALLOWED[i % len(_ALLOWED)]]
        problems.append(
            Problem(
                id=pid,
                source=f"post-{i}",
                nl_text=f"Prove that {i} + 1 = {i + 1}.",
                answer=str(i + 1) if i % 5 == 0 else None,
                tags=tags,
                well_defined=status,
            )
        )
    return problems


def _translation_for(index: int) -> str:
    if index % 10 == 3:  # 3 of the 30 kept: prover rejects
        return f"theorem mock_{index} (FAKE_ERROR : ℕ) : 0 = 1 := by sorry"
    if index % 10 == 7:  # 3 of the 30 kept: not even parseable
        return f"this is not lean, sample {index}"
    if index % 10 == 4:  # exercises the auto-fixer on the way through
        return f"theorem mock_{index} (a b : ℝ) (h : a >= b >= 0) : a >= 0 := by sorry"
    return f"theorem mock_{index} (x : ℕ) (h : x = {index}) : x + 1 = {index + 1} := by sorry"


def _nli_response(index: int) -> str:
    # 6 of the 24 compiling samples get a negative NLI read
    if index % 10 in (1, 5):
        return "The goals differ. **different**"
    return "Same problem restated. **same**"


def make_backends() -> StageBackends:
    def translator(prompt: str, key: str | None, n: int):
        assert key is not None
        pid = key.split(":")[1]
        index = int(pid.rsplit("-", 1)[1])
        if key.startswith("nl2fl:"):
            return [_translation_for(index)] * n
        raise AssertionError(f"unexpected translator key {key}")

    def back_translator(prompt: str, key: str | None, n: int):
        assert key and key.startswith("fl2nl:")
        pid = key.split(":")[1]
        index = int(pid.rsplit("-", 1)[1])
        return [f"Prove that {index} + 1 = {index + 1}."]

    def nli_judge(prompt: str, key: str | None, n: int):
        assert key and key.startswith("nli:")
        pid = key.split(":")[1]
        index = int(pid.rsplit("-", 1)[1])
        return [_nli_response(index)]

    return StageBackends(
        translator=ScriptedBackend(translator),
        nli_judge=ScriptedBackend(nli_judge),
        back_translator=ScriptedBackend(back_translator),
    )
