"""Stage orchestration for active-learning rounds."""

from mathforge.pipeline.stages import (
    DEFAULT_ALLOWLIST,
    TagAllowlist,
    filter_by_tags,
    rephrase_answer,
)
from mathforge.pipeline.round import (
    FunnelReport,
    RoundConfig,
    RoundResult,
    StageBackends,
    run_round,
)
from mathforge.pipeline.review import ReviewBatch, enqueue_review, merge_human_labels
from mathforge.pipeline.imo import imo_mode
from mathforge.pipeline.prove import ProofSearchSummary, proof_search

__all__ = [
    "DEFAULT_ALLOWLIST",
    "TagAllowlist",
    "filter_by_tags",
    "rephrase_answer",
    "FunnelReport",
    "RoundConfig",
    "RoundResult",
    "StageBackends",
    "run_round",
    "ReviewBatch",
    "enqueue_review",
    "merge_human_labels",
    "imo_mode",
    "ProofSearchSummary",
    "proof_search",
]
