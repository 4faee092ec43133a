"""Whole-proof search: sample complete proofs and check each, stopping early."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from mathforge.errors import PoolError, TransportError, ValidationError
from mathforge.gateway.backends import Backend, with_retries
from mathforge.repl.verdict import CompileKind

_PROOF_PROMPT = """\
Complete the proof of the following Lean 4 theorem. Replace 'sorry' with a
full tactic proof. Output only the proof term starting with 'by'.

{statement}"""


@dataclass
class ProofSearchSummary:
    solved: bool = False
    winning_index: int | None = None  # 1-based attempt number
    winning_proof: str | None = None
    attempts: int = 0
    failure_kinds: Counter = field(default_factory=Counter)
    retryable: bool = False


def proof_search(
    statement_text: str,
    proof_k: int,
    prover_backend: Backend,
    pool,
    *,
    key: str | None = None,
) -> ProofSearchSummary:
    """Check up to proof_k sampled whole proofs, stopping at the first pass."""
    if proof_k < 0:
        raise ValidationError("proof_k must be >= 0")
    summary = ProofSearchSummary()
    if proof_k == 0:
        return summary
    try:
        proofs = with_retries(
            lambda: prover_backend.complete(
                _PROOF_PROMPT.format(statement=statement_text),
                n=proof_k,
                temperature=0.7,
                key=key,
            )
        )
    except TransportError:
        summary.retryable = True
        return summary
    for index, proof in enumerate(proofs[:proof_k], start=1):
        try:
            verdict = pool.check_proof(statement_text, proof.strip())
        except PoolError:
            summary.retryable = True
            break
        summary.attempts = index
        if verdict.kind is CompileKind.PROOF_PASS:
            summary.solved = True
            summary.winning_index = index
            summary.winning_proof = proof.strip()
            break
        summary.failure_kinds[verdict.kind.value] += 1
    return summary
