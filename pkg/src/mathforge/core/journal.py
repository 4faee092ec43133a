"""Append-only line-delimited JSON journal with single-writer locking.

Appends are durable (fsync) and totally ordered; a corrupt trailing record,
the signature of a crash mid-write, is truncated away with a warning. Corrupt
records anywhere else are a hard error.
"""

from __future__ import annotations

import fcntl
import json
import os
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from mathforge.errors import JournalCorruptError, StoreLockError


def encode_record(record: dict) -> str:
    """Canonical one-line encoding; stable byte-for-byte for equal records."""
    return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class Receipt:
    seq: int
    offset: int


class Journal:
    """One JSONL file. Open in writer mode to append; readers never lock."""

    def __init__(self, path: Path | str, writer: bool = False):
        self.path = Path(path)
        self.writer = writer
        self._fh = None
        self._lock_fh = None
        self._count = 0
        if writer:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._acquire_lock()
            self._recover()
            self._fh = open(self.path, "a", encoding="utf-8")
        self._count = sum(1 for _ in self.iter_records())

    def _acquire_lock(self) -> None:
        lock_path = self.path.with_suffix(self.path.suffix + ".lock")
        self._lock_fh = open(lock_path, "a+")
        try:
            fcntl.flock(self._lock_fh.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            self._lock_fh.close()
            self._lock_fh = None
            raise StoreLockError(f"another writer holds {lock_path}") from None

    def _recover(self) -> None:
        """Truncate a partial trailing record left by a crashed writer.

        The good prefix is the run of valid newline-terminated records from
        the start. A valid record appearing after corruption means the damage
        is not a torn tail write, and that is a hard error.
        """
        if not self.path.exists():
            return
        data = self.path.read_bytes()
        if not data:
            return
        good_end = 0
        while good_end < len(data):
            nl = data.find(b"\n", good_end)
            if nl < 0:
                break
            try:
                json.loads(data[good_end:nl].decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError):
                break
            good_end = nl + 1
        if good_end == len(data):
            return
        for line in data[good_end:].split(b"\n")[1:-1]:
            try:
                json.loads(line.decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError):
                continue
            raise JournalCorruptError(
                f"{self.path}: corrupt record at byte {good_end} is not trailing"
            )
        warnings.warn(
            f"{self.path}: truncating corrupt trailing record "
            f"({len(data) - good_end} bytes)",
            stacklevel=2,
        )
        with open(self.path, "r+b") as fh:
            fh.truncate(good_end)

    def append(self, record: dict) -> Receipt:
        if not self.writer or self._fh is None:
            raise StoreLockError(f"{self.path} not opened for writing")
        offset = self._fh.tell()
        self._fh.write(encode_record(record) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())
        receipt = Receipt(seq=self._count, offset=offset)
        self._count += 1
        return receipt

    def iter_records(self) -> Iterator[dict]:
        if not self.path.exists():
            return
        with open(self.path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
        for lineno, line in enumerate(lines, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                yield json.loads(stripped)
            except json.JSONDecodeError:
                for later in lines[lineno:]:
                    try:
                        json.loads(later.strip() or "null")
                    except json.JSONDecodeError:
                        continue
                    raise JournalCorruptError(
                        f"{self.path}: corrupt record at line {lineno} is not trailing"
                    ) from None
                warnings.warn(
                    f"{self.path}: ignoring corrupt trailing record", stacklevel=2
                )
                return

    def __len__(self) -> int:
        return self._count

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None
        if self._lock_fh is not None:
            fcntl.flock(self._lock_fh.fileno(), fcntl.LOCK_UN)
            self._lock_fh.close()
            self._lock_fh = None

    def __enter__(self) -> "Journal":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
