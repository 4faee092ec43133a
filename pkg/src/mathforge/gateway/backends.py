"""Chat-completion backends: remote HTTP, fixture-directory mock, scripted mock.

Every backend implements ``complete(prompt, n=..., temperature=..., key=...)``
returning n completion strings. The optional key is a stable semantic handle
(e.g. "nl2fl:prob-12:0") that mock backends use to look up fixtures; the
remote backend ignores it. The whole pipeline runs to completion against a
mock backend with zero network access.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from pathlib import Path
from typing import Callable, Protocol

import httpx

from mathforge.errors import TransportError, ValidationError

log = logging.getLogger(__name__)

DEFAULT_RETRIES = 2


class Backend(Protocol):
    def complete(
        self, prompt: str, *, n: int = 1, temperature: float = 0.0, key: str | None = None
    ) -> list[str]: ...


def with_retries(
    fn: Callable[[], list[str]],
    retries: int = DEFAULT_RETRIES,
    backoff_s: float = 0.5,
) -> list[str]:
    """Run a backend call with exponential backoff on transport failures."""
    attempt = 0
    while True:
        try:
            return fn()
        except TransportError:
            if attempt >= retries:
                raise
            time.sleep(backoff_s * (2**attempt))
            attempt += 1


class RemoteBackend:
    """OpenAI-style chat-completions endpoint."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key_env: str = "FORGE_API_KEY",
        timeout_s: float = 120.0,
        trace: bool = False,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key_env = api_key_env
        self.trace = trace
        self._client = httpx.Client(timeout=timeout_s)

    def complete(
        self, prompt: str, *, n: int = 1, temperature: float = 0.0, key: str | None = None
    ) -> list[str]:
        headers = {}
        api_key = os.environ.get(self.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "n": n,
            "temperature": temperature,
        }
        if self.trace:
            log.info("POST %s/chat/completions body=%s", self.base_url, json.dumps(body)[:2000])
        try:
            response = self._client.post(
                f"{self.base_url}/chat/completions", json=body, headers=headers
            )
        except httpx.HTTPError as exc:
            raise TransportError(f"backend request failed: {exc}") from exc
        if response.status_code >= 500 or response.status_code == 429:
            raise TransportError(f"backend returned {response.status_code}")
        if response.status_code >= 400:
            raise ValidationError(f"backend rejected request: {response.text[:500]}")
        payload = response.json()
        if self.trace:
            log.info("response=%s", json.dumps(payload)[:2000])
        try:
            return [c["message"]["content"] for c in payload["choices"][:n]]
        except (KeyError, TypeError) as exc:
            raise TransportError(f"malformed backend response: {exc}") from exc


class MockBackend:
    """Reads completions from a directory of keyed fixture files.

    ``<key>.json`` holds a JSON list of completions; ``<key>.txt`` a single
    completion. Slashes and colons in keys map to '__' on disk.
    """

    def __init__(self, fixture_dir: Path | str):
        self.fixture_dir = Path(fixture_dir)
        if not self.fixture_dir.is_dir():
            raise ValidationError(f"mock fixture directory not found: {fixture_dir}")

    def complete(
        self, prompt: str, *, n: int = 1, temperature: float = 0.0, key: str | None = None
    ) -> list[str]:
        if key is None:
            raise ValidationError("mock backend requires a fixture key")
        safe = key.replace("/", "__").replace(":", "__")
        json_path = self.fixture_dir / f"{safe}.json"
        txt_path = self.fixture_dir / f"{safe}.txt"
        if json_path.exists():
            completions = json.loads(json_path.read_text(encoding="utf-8"))
        elif txt_path.exists():
            completions = [txt_path.read_text(encoding="utf-8")]
        else:
            raise ValidationError(f"no mock fixture for key {key!r} in {self.fixture_dir}")
        if len(completions) < n:
            # cycle deterministically rather than fail a high-n run
            completions = (completions * ((n // len(completions)) + 1))[:n]
        return list(completions[:n])


class ScriptedBackend:
    """In-memory mock driven by a key->completions mapping or a function."""

    def __init__(
        self,
        responses: dict[str, list[str]] | Callable[[str, str | None, int], list[str]],
    ):
        self._responses = responses
        self.calls: list[tuple[str | None, int]] = []

    def complete(
        self, prompt: str, *, n: int = 1, temperature: float = 0.0, key: str | None = None
    ) -> list[str]:
        self.calls.append((key, n))
        if callable(self._responses):
            out = self._responses(prompt, key, n)
        else:
            if key not in self._responses:
                raise ValidationError(f"scripted backend has no response for key {key!r}")
            out = self._responses[key]
        if len(out) < n:
            out = (out * ((n // max(len(out), 1)) + 1))[:n]
        return list(out[:n])


class CappedBackend:
    """Bounds concurrent requests through a shared backend."""

    def __init__(self, inner: Backend, max_concurrent: int = 4):
        self._inner = inner
        self._sem = threading.Semaphore(max_concurrent)

    def complete(
        self, prompt: str, *, n: int = 1, temperature: float = 0.0, key: str | None = None
    ) -> list[str]:
        with self._sem:
            return self._inner.complete(prompt, n=n, temperature=temperature, key=key)
