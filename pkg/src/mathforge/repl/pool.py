"""Subprocess pool speaking the line-delimited JSON prover REPL protocol.

Each worker owns one REPL subprocess initialized once with the shared
mathematical library environment; jobs reuse that environment read-only.
Requests are ``{"cmd": <declaration>, "env": <id>}`` and responses
``{"env": ..., "messages": [...], "sorries": [...]}``, one JSON object per
line over the worker's stdin/stdout.

Every submitted job terminates in exactly one verdict: timeouts kill and
replace the worker, crashes surface as ``worker_crash``, and workers recycle
after a bounded number of jobs to cap elaborator memory growth.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading
import time
from concurrent.futures import Future
from dataclasses import dataclass
from pathlib import Path

from mathforge.errors import (
    PoolClosedError,
    PoolError,
    PoolSaturatedError,
    ToolchainError,
    ValidationError,
    VersionMismatchError,
)
from mathforge.repl.verdict import (
    CompileKind,
    CompileVerdict,
    classify_response,
    parse_wire_messages,
)

DEFAULT_STATEMENT_TIMEOUT_S = 60.0
DEFAULT_PROOF_TIMEOUT_S = 120.0
DEFAULT_INIT_CMD = "import Mathlib"


@dataclass(frozen=True)
class PoolConfig:
    """Pool sizing, timeouts, and the prover toolchain to drive."""

    workers: int = 1
    timeout_s: float = DEFAULT_STATEMENT_TIMEOUT_S
    max_jobs_per_worker: int = 200
    env_tag: str = "Lean v4.8.0-rc1 with Mathlib4"
    repl_cmd: tuple[str, ...] = ()
    init_cmd: str | None = DEFAULT_INIT_CMD
    proof_timeout_s: float = DEFAULT_PROOF_TIMEOUT_S
    init_timeout_s: float = 600.0
    lean_bin: str | None = None
    record_dir: str | None = None
    queue_factor: int = 4

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")
        if self.timeout_s <= 0 or self.proof_timeout_s <= 0:
            raise ValidationError("timeouts must be > 0")
        if not self.repl_cmd:
            raise ValidationError("repl_cmd must name the REPL executable")


class _WorkerCrashed(Exception):
    pass


class _WorkerTimedOut(Exception):
    pass


class _Subprocess:
    """One REPL subprocess with a line-pumping reader thread."""

    def __init__(self, cmd: tuple[str, ...]):
        try:
            self.proc = subprocess.Popen(
                list(cmd),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise ToolchainError(f"cannot start REPL worker {cmd[0]!r}: {exc}") from exc
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self) -> None:
        assert self.proc.stdout is not None
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF sentinel

    def request(self, payload: dict, timeout: float) -> dict:
        try:
            assert self.proc.stdin is not None
            self.proc.stdin.write(json.dumps(payload, ensure_ascii=False) + "\n")
            self.proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise _WorkerCrashed(str(exc)) from exc
        deadline = time.monotonic() + timeout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise _WorkerTimedOut()
            try:
                line = self._lines.get(timeout=min(remaining, 0.5))
            except queue.Empty:
                continue
            if line is None:
                raise _WorkerCrashed("worker closed its output stream")
            line = line.strip()
            if not line:
                continue
            try:
                return json.loads(line)
            except json.JSONDecodeError:
                continue  # stray non-protocol chatter

    def kill(self) -> None:
        try:
            self.proc.kill()
            self.proc.wait(timeout=5)
        except Exception:
            pass

    @property
    def alive(self) -> bool:
        return self.proc.poll() is None


@dataclass
class _Job:
    text: str
    expects_proof: bool
    future: Future


_SHUTDOWN = object()


class ReplPool:
    """Shareable handle over N REPL workers with a bounded job queue."""

    def __init__(self, config: PoolConfig):
        self.config = config
        self._jobs: queue.Queue = queue.Queue(maxsize=config.queue_factor * config.workers)
        self._threads: list[threading.Thread] = []
        self._ready = threading.Barrier(config.workers + 1)
        self._startup_errors: list[Exception] = []
        self._closed = False
        self._record_lock = threading.Lock()
        self._record_seq = 0
        self._subprocesses: dict[int, _Subprocess | None] = {}
        self.startup_seconds = 0.0

    def worker_pids(self) -> list[int]:
        """PIDs of the live worker subprocesses, for ops and fault injection."""
        return sorted(
            sub.proc.pid
            for sub in self._subprocesses.values()
            if sub is not None and sub.alive
        )

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> "ReplPool":
        _check_toolchain(self.config)
        t0 = time.monotonic()
        for idx in range(self.config.workers):
            t = threading.Thread(target=self._worker_loop, args=(idx,), daemon=True)
            t.start()
            self._threads.append(t)
        self._ready.wait()
        if self._startup_errors:
            self.shutdown()
            raise PoolError(f"pool startup failed: {self._startup_errors[0]}")
        self.startup_seconds = time.monotonic() - t0
        return self

    def shutdown(self) -> None:
        if self._closed:
            return
        self._closed = True
        for _ in self._threads:
            self._jobs.put(_SHUTDOWN)
        for t in self._threads:
            t.join(timeout=30)

    def __enter__(self) -> "ReplPool":
        return self

    def __exit__(self, *exc) -> None:
        self.shutdown()

    # -- job submission -----------------------------------------------------

    def submit(self, text: str, expects_proof: bool = False, *, wait: bool = True) -> Future:
        """Queue a declaration for checking; blocks once the queue is full.

        With wait=False a full queue raises PoolSaturatedError instead.
        """
        if self._closed:
            raise PoolClosedError("pool has been shut down")
        job = _Job(text=text, expects_proof=expects_proof, future=Future())
        try:
            if wait:
                self._jobs.put(job)
            else:
                self._jobs.put_nowait(job)
        except queue.Full:
            raise PoolSaturatedError("job queue is full") from None
        return job.future

    def check_statement(self, statement_text: str) -> CompileVerdict:
        """Check one normalized declaration ending ':= by sorry'."""
        text = statement_text.strip()
        if not text.endswith(":= by sorry"):
            raise ValidationError("statement must be normalized to end with ':= by sorry'")
        return self.submit(text, expects_proof=False).result()

    def check_proof(self, statement_text: str, proof_text: str) -> CompileVerdict:
        """Check a full proof: proof_text replaces the sorry terminator."""
        return self.submit(
            splice_proof(statement_text, proof_text), expects_proof=True
        ).result()

    # -- worker loop --------------------------------------------------------

    def _worker_loop(self, idx: int) -> None:
        proc: _Subprocess | None = None
        env_id = None
        jobs_done = 0
        try:
            proc, env_id = self._spawn_worker()
        except Exception as exc:
            self._startup_errors.append(exc)
        self._subprocesses[idx] = proc
        self._ready.wait()

        while True:
            item = self._jobs.get()
            if item is _SHUTDOWN:
                break
            job: _Job = item
            if proc is None or not proc.alive or jobs_done >= self.config.max_jobs_per_worker:
                if proc is not None:
                    proc.kill()
                try:
                    proc, env_id = self._spawn_worker()
                    jobs_done = 0
                except Exception as exc:
                    job.future.set_result(
                        self._verdict(CompileKind.WORKER_CRASH, [], 0, note=str(exc))
                    )
                    proc = None
                    self._subprocesses[idx] = None
                    continue
                self._subprocesses[idx] = proc

            payload = {"cmd": job.text}
            if env_id is not None:
                payload["env"] = env_id
            timeout = (
                self.config.proof_timeout_s if job.expects_proof else self.config.timeout_s
            )
            started = time.monotonic()
            try:
                response = proc.request(payload, timeout)
            except _WorkerTimedOut:
                proc.kill()
                proc = None
                self._subprocesses[idx] = None
                elapsed = int((time.monotonic() - started) * 1000)
                self._record(payload, None, job.expects_proof, "timeout")
                job.future.set_result(self._verdict(CompileKind.TIMEOUT, [], elapsed))
                continue
            except _WorkerCrashed:
                proc = None
                self._subprocesses[idx] = None
                elapsed = int((time.monotonic() - started) * 1000)
                self._record(payload, None, job.expects_proof, "crash")
                job.future.set_result(self._verdict(CompileKind.WORKER_CRASH, [], elapsed))
                continue
            jobs_done += 1
            elapsed = int((time.monotonic() - started) * 1000)
            self._record(payload, response, job.expects_proof, "ok")
            messages = parse_wire_messages(response.get("messages", []))
            kind = classify_response(messages, had_timeout=False, expects_proof=job.expects_proof)
            job.future.set_result(
                CompileVerdict(
                    kind=kind,
                    messages=messages,
                    elapsed_ms=elapsed,
                    env_tag=self.config.env_tag,
                )
            )

        if proc is not None:
            proc.kill()

    def _spawn_worker(self) -> tuple[_Subprocess, int | None]:
        proc = _Subprocess(self.config.repl_cmd)
        env_id = None
        if self.config.init_cmd:
            try:
                response = proc.request(
                    {"cmd": self.config.init_cmd}, self.config.init_timeout_s
                )
            except (_WorkerCrashed, _WorkerTimedOut) as exc:
                proc.kill()
                raise PoolError(f"worker failed to initialize environment: {exc}") from exc
            env_id = response.get("env")
        return proc, env_id

    def _verdict(self, kind: CompileKind, messages, elapsed_ms: int, note: str = "") -> CompileVerdict:
        return CompileVerdict(
            kind=kind,
            messages=tuple(messages),
            elapsed_ms=elapsed_ms,
            env_tag=self.config.env_tag,
        )

    def _record(self, request: dict, response: dict | None, expects_proof: bool, outcome: str) -> None:
        if not self.config.record_dir:
            return
        with self._record_lock:
            seq = self._record_seq
            self._record_seq += 1
        path = Path(self.config.record_dir) / f"response-{seq:05d}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(
                {
                    "request": request,
                    "response": response,
                    "expects_proof": expects_proof,
                    "outcome": outcome,
                },
                ensure_ascii=False,
                indent=2,
            ),
            encoding="utf-8",
        )


def spawn_pool(config: PoolConfig) -> ReplPool:
    """Start a pool; workers import the library environment exactly once each."""
    return ReplPool(config).start()


def splice_proof(statement_text: str, proof_text: str) -> str:
    """Replace the sorry terminator with a real proof body."""
    text = statement_text.strip()
    for suffix in (":= by sorry", ":= sorry"):
        if text.endswith(suffix):
            text = text[: -len(suffix)].rstrip()
            break
    proof = proof_text.strip()
    return f"{text} := {proof}"


def _check_toolchain(config: PoolConfig) -> None:
    if not config.lean_bin:
        return
    try:
        result = subprocess.run(
            [config.lean_bin, "--version"], capture_output=True, text=True, timeout=30
        )
    except FileNotFoundError as exc:
        raise ToolchainError(f"prover binary not found: {config.lean_bin}") from exc
    found = result.stdout.strip() or result.stderr.strip()
    if not config.env_tag:
        return
    # env_tag "Lean v4.8.0-rc1 with Mathlib4" pins version core "4.8.0-rc1"
    parts = config.env_tag.split()
    version_core = parts[1].lstrip("v") if len(parts) > 1 else config.env_tag
    if version_core not in found:
        raise VersionMismatchError(found=found, expected=config.env_tag)
