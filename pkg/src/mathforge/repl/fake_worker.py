"""Simulated prover REPL speaking the line-delimited JSON wire protocol.

Lets the pool, pipeline, and review server run with no Lean toolchain: the
worker answers an import command with an environment id and classifies
declarations by marker identifiers embedded in the text:

  FAKE_ERROR       respond with an elaboration error
  FAKE_WARN        respond with a non-sorry warning
  FAKE_SLEEP_<ms>  sleep before answering (timeout tests)
  FAKE_CRASH       exit immediately mid-job (crash tests)

Chained comparisons ('a >= b >= c') are rejected the way the real prover's
non-associative operators reject them. Anything else answers like a healthy
prover: a sorry terminator yields the 'declaration uses sorry' warning, a
real proof yields no messages.

Run as: python -m mathforge.repl.fake_worker
"""

from __future__ import annotations

import json
import os
import re
import sys
import time

_SLEEP = re.compile(r"FAKE_SLEEP_(\d+)")
_CHAINED = re.compile(r"[<>≤≥]=?\s*[\w.]+\s*[<>≤≥]")


def _respond(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, ensure_ascii=False) + "\n")
    sys.stdout.flush()


def main() -> None:
    init_delay = float(os.environ.get("FORGE_FAKE_INIT_DELAY", "0"))
    env_counter = 0
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            continue
        cmd = request.get("cmd", "")

        if cmd.startswith("import"):
            if init_delay:
                time.sleep(init_delay)
            _respond({"env": 0})
            continue

        slept = _SLEEP.search(cmd)
        if slept:
            time.sleep(int(slept.group(1)) / 1000.0)
        if "FAKE_CRASH" in cmd:
            os._exit(1)

        env_counter += 1
        messages = []
        if _CHAINED.search(cmd):
            messages.append(
                {
                    "severity": "error",
                    "pos": {"line": 1, "column": 0},
                    "endPos": {"line": 1, "column": 10},
                    "data": "unexpected token; expected term (non-associative comparison chain)",
                }
            )
        if "FAKE_ERROR" in cmd:
            messages.append(
                {
                    "severity": "error",
                    "pos": {"line": 1, "column": 0},
                    "endPos": {"line": 1, "column": 10},
                    "data": "unknown identifier 'FAKE_ERROR'",
                }
            )
        if "FAKE_WARN" in cmd:
            messages.append(
                {
                    "severity": "warning",
                    "pos": {"line": 1, "column": 0},
                    "endPos": {"line": 1, "column": 10},
                    "data": "unused variable `FAKE_WARN`",
                }
            )
        sorries = []
        if not messages and cmd.rstrip().endswith("sorry"):
            messages.append(
                {
                    "severity": "warning",
                    "pos": {"line": 1, "column": 8},
                    "endPos": {"line": 1, "column": 12},
                    "data": "declaration uses 'sorry'",
                }
            )
            sorries.append({"pos": {"line": 1, "column": len(cmd)}, "goal": "⊢ ?"})
        _respond({"env": env_counter, "messages": messages, "sorries": sorries})


if __name__ == "__main__":
    main()
