"""Prover REPL subprocess pool: statement and proof checking under timeouts."""

from mathforge.repl.verdict import (
    CompileKind,
    CompileVerdict,
    Message,
    Severity,
    classify_response,
)
from mathforge.repl.pool import PoolConfig, ReplPool, spawn_pool

__all__ = [
    "CompileKind",
    "CompileVerdict",
    "Message",
    "Severity",
    "classify_response",
    "PoolConfig",
    "ReplPool",
    "spawn_pool",
]
