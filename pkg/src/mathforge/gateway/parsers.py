"""Pure parsers for model responses: bold verdict markers and extraction JSON."""

from __future__ import annotations

import json
import re

from mathforge.errors import ExtractionFailure

_CODE_FENCE = re.compile(r"```[a-zA-Z]*\n?|```")


def _marker_pattern(marker: str) -> re.Pattern:
    return re.compile(
        r"\*\*\s*" + re.escape(marker) + r"\s*[.!,;:]?\s*\*\*", re.IGNORECASE
    )


def parse_bold_verdict(text: str, positive_marker: str, negative_marker: str) -> str:
    """Scan for **marker** tokens; the last occurrence wins.

    Markers are searched directly (not via bold-pair scanning) so a marker
    appended to arbitrary text is always seen. Matching is case-insensitive
    and tolerates trailing punctuation inside the bold span. Returns
    'positive', 'negative', or 'indeterminate' when no marker is present.
    """
    if not positive_marker or not negative_marker or positive_marker == negative_marker:
        raise ValueError("markers must be distinct and non-empty")
    last_positive = _last_match_end(_marker_pattern(positive_marker), text)
    last_negative = _last_match_end(_marker_pattern(negative_marker), text)
    if last_positive is None and last_negative is None:
        return "indeterminate"
    if last_negative is None or (last_positive is not None and last_positive > last_negative):
        return "positive"
    return "negative"


def _last_match_end(pattern: re.Pattern, text: str) -> int | None:
    end = None
    for m in pattern.finditer(text):
        end = m.end()
    return end


def parse_extraction_json(text: str) -> list[dict]:
    """Coerce an extraction response into a list of problem drafts.

    Tolerant pipeline: strips markdown code fences, locates the outermost JSON
    array, and defaults missing keys (tags -> [], answer -> ""). Elements
    without problem text are dropped. Raises ExtractionFailure, retaining the
    raw text, when no array can be decoded.
    """
    cleaned = _CODE_FENCE.sub("", text)
    array_text = _outermost_array(cleaned)
    if array_text is None:
        raise ExtractionFailure("no JSON array found in response", raw=text)
    try:
        data = json.loads(array_text)
    except json.JSONDecodeError as exc:
        raise ExtractionFailure(f"JSON array failed to decode: {exc}", raw=text) from exc
    if not isinstance(data, list):
        raise ExtractionFailure("decoded JSON is not an array", raw=text)
    drafts = []
    for element in data:
        if not isinstance(element, dict):
            continue
        problem = element.get("problem")
        if not problem or not str(problem).strip():
            continue
        answer = element.get("answer", "")
        tags = element.get("tags", [])
        if not isinstance(tags, list):
            tags = [str(tags)]
        drafts.append(
            {
                "problem": str(problem).strip(),
                "answer": str(answer).strip() if answer is not None else "",
                "tags": [str(t) for t in tags],
            }
        )
    return drafts


def _outermost_array(text: str) -> str | None:
    start = text.find("[")
    if start < 0:
        return None
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    return None
