"""mathforge: translate natural-language math problems into checked Lean 4 statements.

The pipeline stages: extract problems from forum posts, judge well-definedness,
filter by tag, translate to formal statements, lint and auto-fix known false
patterns, compile-check through a prover REPL pool, back-translate and gate on
NLI agreement, queue survivors and failures for human review, and export
accepted pairs as two-direction training data.
"""

__version__ = "0.1.0"
