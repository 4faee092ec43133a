"""Domain types, round metrics, persistence journal, and dataset export."""

from mathforge.core.types import (
    HumanVerdict,
    PassAtK,
    Problem,
    RoundManifest,
    SamplingConfig,
    TranslationCandidate,
    Verdict,
    WellDefined,
    candidate_key,
    normalize_tag,
)
from mathforge.core.metrics import (
    compute_round_stats,
    format_percent,
    pass_rate,
    weighted_accuracy,
)
from mathforge.core.journal import Journal, Receipt
from mathforge.core.store import Store
from mathforge.core.export import export_dataset, export_training_pairs

__all__ = [
    "HumanVerdict",
    "PassAtK",
    "Problem",
    "RoundManifest",
    "SamplingConfig",
    "TranslationCandidate",
    "Verdict",
    "WellDefined",
    "candidate_key",
    "normalize_tag",
    "compute_round_stats",
    "format_percent",
    "pass_rate",
    "weighted_accuracy",
    "Journal",
    "Receipt",
    "Store",
    "export_dataset",
    "export_training_pairs",
]
