"""Fixed prompt registry.

The extraction, well-definedness, and NLI prompts are stored verbatim so
behavior is anchored and prompt drift shows up in diffs; the two translation
prompts are this tool's own fixed pair. The registry digest is folded into
each round's config digest.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass


@dataclass(frozen=True)
class PromptTemplate:
    prompt_id: str
    template_text: str

    def render(self, **values: str) -> str:
        return self.template_text.format(**values)


_EXTRACT = """\
You are a data labeler. Here is a discussion between math students. It may \
contain several problems and several solutions. Please extract them in a JSON \
format. Each problem is an element and has keys including problem (str, you \
should not miss any assumption like non-negativity of numbers, be formal), \
answer (return numbers as a string for calculation problems and return an \
empty string for proof problems), and tags (list of str). Tags should \
identify the category of this math problem. Possible tags contain: equation, \
inequality, number_theory, algebra, probability, combination, trigonometry, \
and etc.

{post}"""

_WELL_DEFINED = """\
Please check whether the following math problem is well-defined? Please \
follow the rules: 1. Consider each condition given in the problem, it is not \
well-defined one variable is used without definition anywhere in the question.
2.The problem is not well-defined if it contains more than one goal or no \
clear goals to solve.
3. Note that inequalities may omit the statement that x,y,z,a,b,c are real \
numbers, but they are well-defined, do not judge them to be ill-defined. \

4. Please reply **well-defined** or **ill-defined** in the final sentence \
with bold format, be sure not to fail well-defined questions.

{problem}"""

_NLI = """\
Please check following two math problems is same or different? Please \
consider each statement in two problems, they are different if any statement \
is different. Please point out any differences you found. Please reply \
**same** or **different** in the final sentence with bold format.

Problem 1: {original}

Problem 2: {back_translated}"""

_NL2FL = """\
Translate the following math problem into a Lean 4 theorem statement. Close \
the proof with ':= by sorry'. Output only the Lean statement.

{problem}"""

_FL2NL = """\
Translate the following Lean 4 theorem statement back into a natural \
language math problem. Output only the problem text.

{statement}"""

PROMPTS: dict[str, PromptTemplate] = {
    "extract": PromptTemplate("extract", _EXTRACT),
    "well_defined": PromptTemplate("well_defined", _WELL_DEFINED),
    "nli": PromptTemplate("nli", _NLI),
    "nl2fl": PromptTemplate("nl2fl", _NL2FL),
    "fl2nl": PromptTemplate("fl2nl", _FL2NL),
}


def registry_digest() -> str:
    payload = "\x00".join(
        f"{pid}\x01{PROMPTS[pid].template_text}" for pid in sorted(PROMPTS)
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
