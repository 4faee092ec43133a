"""Directory-backed store: problem/candidate/label journals plus round manifests.

Single writer per store (flock on the candidates journal's lock file), any
number of concurrent readers. Candidate appends are keyed on
(problem_id, round, sample_index); duplicates are rejected so a crashed round
can re-run and resume without duplicating completed work. Human labels are a
separate journal applied as an overlay (last submission wins), which keeps
every API mutation append-only.
"""

from __future__ import annotations

import json
from pathlib import Path

from mathforge.core.journal import Journal, Receipt, encode_record
from mathforge.core.types import (
    HumanVerdict,
    Problem,
    RoundManifest,
    TranslationCandidate,
    candidate_key,
)
from mathforge.errors import DuplicateKeyError, ValidationError

STORE_VERSION = "forge-store@1"


class Store:
    def __init__(self, root: Path | str, writer: bool = False):
        self.root = Path(root)
        self.writer = writer
        if writer:
            self.root.mkdir(parents=True, exist_ok=True)
            version_file = self.root / "VERSION"
            if version_file.exists():
                self._check_version(version_file)
            else:
                version_file.write_text(STORE_VERSION + "\n", encoding="utf-8")
        else:
            if not self.root.is_dir():
                raise ValidationError(f"store directory not found: {self.root}")
            self._check_version(self.root / "VERSION")
        self.problems = Journal(self.root / "problems.jsonl", writer=writer)
        self.candidates = Journal(self.root / "candidates.jsonl", writer=writer)
        self.raw = Journal(self.root / "raw.jsonl", writer=writer)
        self.labels = Journal(self.root / "labels.jsonl", writer=writer)
        if writer:
            (self.root / "manifests").mkdir(exist_ok=True)
        self._problem_ids: set[str] = {r["id"] for r in self.problems.iter_records()}
        self._candidate_keys: set[str] = {
            candidate_key(r["problem_id"], r["round"], r["sample_index"])
            for r in self.candidates.iter_records()
        }
        self._raw_keys: set[str] = {
            candidate_key(r["problem_id"], r["round"], r["sample_index"])
            for r in self.raw.iter_records()
        }

    def _check_version(self, version_file: Path) -> None:
        if not version_file.exists():
            raise ValidationError(f"not a store (missing VERSION): {self.root}")
        found = version_file.read_text(encoding="utf-8").strip()
        if found != STORE_VERSION:
            raise ValidationError(
                f"store version mismatch: found {found!r}, expected {STORE_VERSION!r}"
            )

    def close(self) -> None:
        for journal in (self.problems, self.candidates, self.raw, self.labels):
            journal.close()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- problems -------------------------------------------------------------

    def append_problem(self, problem: Problem) -> Receipt:
        if problem.id in self._problem_ids:
            raise DuplicateKeyError(f"problem id already in store: {problem.id}")
        receipt = self.problems.append(problem.to_dict())
        self._problem_ids.add(problem.id)
        return receipt

    def load_problems(self) -> dict[str, Problem]:
        return {r["id"]: Problem.from_dict(r) for r in self.problems.iter_records()}

    # -- candidates -----------------------------------------------------------

    def has_candidate(self, problem_id: str, round_no: int, sample_index: int) -> bool:
        return candidate_key(problem_id, round_no, sample_index) in self._candidate_keys

    def append_candidate(self, cand: TranslationCandidate) -> Receipt:
        if cand.key in self._candidate_keys:
            raise DuplicateKeyError(f"candidate already journaled: {cand.key}")
        receipt = self.candidates.append(cand.to_dict())
        self._candidate_keys.add(cand.key)
        return receipt

    def append_raw(self, problem_id: str, round_no: int, sample_index: int, text: str) -> None:
        """Journal a pre-fix translation; silently skipped when already present."""
        key = candidate_key(problem_id, round_no, sample_index)
        if key in self._raw_keys:
            return
        self.raw.append(
            {
                "problem_id": problem_id,
                "round": round_no,
                "sample_index": sample_index,
                "raw_text": text,
            }
        )
        self._raw_keys.add(key)

    def load_round(self, round_no: int) -> list[TranslationCandidate]:
        """Candidates for a round, in append order, with label overlays applied."""
        overlays = self._label_overlays(round_no)
        out = []
        for record in self.candidates.iter_records():
            if record["round"] != round_no:
                continue
            cand = TranslationCandidate.from_dict(record)
            overlay = overlays.get(cand.key)
            if overlay is not None:
                cand = cand.with_human(
                    HumanVerdict(overlay["verdict"]), overlay.get("modified_text")
                )
            out.append(cand)
        return out

    # -- labels ---------------------------------------------------------------

    def append_label(
        self,
        key: str,
        verdict: HumanVerdict,
        modified_text: str | None = None,
        note: str | None = None,
    ) -> Receipt:
        if key not in self._candidate_keys:
            raise ValidationError(f"label references unknown candidate: {key}")
        if verdict is HumanVerdict.MODIFIED and not modified_text:
            raise ValidationError("modified verdict requires modified_text")
        return self.labels.append(
            {
                "key": key,
                "verdict": verdict.value,
                "modified_text": modified_text,
                "note": note,
            }
        )

    def _label_overlays(self, round_no: int) -> dict[str, dict]:
        overlays: dict[str, dict] = {}
        for record in self.labels.iter_records():
            parts = record["key"].rsplit("/", 2)
            if len(parts) == 3 and parts[1] == str(round_no):
                overlays[record["key"]] = record
        return overlays

    def labeled_keys(self, round_no: int, accepted_only: bool = False) -> set[str]:
        keys = set()
        for key, record in self._label_overlays(round_no).items():
            if accepted_only and record["verdict"] not in ("correct", "modified"):
                continue
            keys.add(key)
        return keys

    # -- manifests --------------------------------------------------------------

    def manifest_path(self, round_no: int) -> Path:
        return self.root / "manifests" / f"round-{round_no}.json"

    def write_manifest(self, manifest: RoundManifest) -> Path:
        path = self.manifest_path(manifest.round)
        path.parent.mkdir(exist_ok=True)
        path.write_text(encode_record(manifest.to_dict()) + "\n", encoding="utf-8")
        return path

    def load_manifest(self, round_no: int) -> RoundManifest:
        path = self.manifest_path(round_no)
        if not path.exists():
            raise ValidationError(f"no manifest for round {round_no}")
        return RoundManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def rounds(self) -> list[int]:
        manifest_dir = self.root / "manifests"
        if not manifest_dir.is_dir():
            return []
        return sorted(
            int(p.stem.split("-", 1)[1]) for p in manifest_dir.glob("round-*.json")
        )
