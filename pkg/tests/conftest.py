from __future__ import annotations

import sys

import pytest

from mathforge.repl.pool import PoolConfig, spawn_pool

FAKE_REPL_CMD = (sys.executable, "-m", "mathforge.repl.fake_worker")


def fake_pool_config(**overrides) -> PoolConfig:
    defaults = dict(
        workers=2,
        timeout_s=5.0,
        proof_timeout_s=5.0,
        init_timeout_s=30.0,
        repl_cmd=FAKE_REPL_CMD,
        init_cmd="import Mathlib",
        env_tag="fake-prover",
    )
    defaults.update(overrides)
    return PoolConfig(**defaults)


@pytest.fixture
def fake_pool():
    pool = spawn_pool(fake_pool_config())
    yield pool
    pool.shutdown()
