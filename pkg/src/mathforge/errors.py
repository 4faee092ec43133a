"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ForgeError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ValidationError(ForgeError):
    """Input violated a documented precondition or invariant."""

    exit_code = 1


class DuplicateKeyError(ValidationError):
    """Append rejected: the (problem_id, round, sample_index) key already exists."""


class StoreLockError(ForgeError):
    """A second writer tried to open a store already locked for writing."""

    exit_code = 2


class JournalCorruptError(ForgeError):
    """A journal line other than the trailing one failed to decode."""

    exit_code = 2


class ParseError(ValidationError):
    """Statement text could not be parsed; carries the failing position."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class ExtractionFailure(ForgeError):
    """Model response could not be coerced into the extraction schema."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class TransportError(ForgeError):
    """Retryable backend transport failure (network, HTTP 5xx, timeout)."""

    exit_code = 3


class ToolchainError(ForgeError):
    """Prover toolchain missing or unusable."""

    exit_code = 2


class VersionMismatchError(ToolchainError):
    """Prover version does not match the configured env_tag."""

    def __init__(self, found: str, expected: str):
        super().__init__(f"prover version mismatch: found {found!r}, expected {expected!r}")
        self.found = found
        self.expected = expected


class PoolError(ForgeError):
    """REPL pool failure (startup, job submission)."""

    exit_code = 3


class PoolClosedError(PoolError):
    """Job submitted after the pool was shut down."""


class PoolSaturatedError(PoolError):
    """Bounded job queue is full and the caller asked not to wait."""
