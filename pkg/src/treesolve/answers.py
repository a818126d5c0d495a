"""Final-answer extraction, normalization to canonical form, and equivalence.

Candidate answers arrive as free text ending in a marker sentence such as
"The answer is 7/2." and need to be compared against gold answers written in
any of several surface forms (LaTeX fractions, currency, decimals, plain
text). Normalization maps all of these onto a small canonical vocabulary so
that voting and scoring compare values, not strings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Literal, Optional

# Phrase that marks a generation as a conclusive answer. Matched
# case-insensitively everywhere.
TERMINAL_MARKER = "the answer is"

AnswerKind = Literal["rational", "decimal-approximate", "symbolic-text"]

_TRAILING_PUNCT = ".,;:!?"
_THOUSANDS_RE = re.compile(r"(?<=\d),(?=\d{3}(?:\D|$))")
_LATEX_FRAC_RE = re.compile(r"^(-?)\\[dt]?frac\{(-?\d+)\}\{(-?\d+)\}$")
_SLASH_FRAC_RE = re.compile(r"^[+-]?\d+\s*/\s*-?\d+$")
_INT_RE = re.compile(r"^[+-]?\d+$")
_DECIMAL_RE = re.compile(r"^[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?$")

# Absolute tolerance when one side of a comparison is only approximately known.
APPROX_TOLERANCE = Fraction(1, 10**6)


@dataclass(frozen=True)
class NormalizedAnswer:
    """An answer reduced to canonical form.

    kind "rational" means numeric_value holds the exact value and
    canonical_text is its reduced a/b or integer rendering. kind
    "decimal-approximate" marks a truncated decimal (input carried a trailing
    ellipsis); numeric_value holds the truncation. kind "symbolic-text" is
    the fallback for anything non-numeric, lowercased with whitespace removed.
    """

    canonical_text: str
    numeric_value: Optional[Fraction]
    kind: AnswerKind


def extract_final_answer(text: str, marker: str = TERMINAL_MARKER) -> Optional[str]:
    """Return the answer text following the last occurrence of ``marker``.

    Matching is case-insensitive. The tail is stripped of leading colons and
    whitespace and of trailing punctuation. Returns None when the marker is
    absent or nothing usable follows it.
    """
    idx = text.lower().rfind(marker.lower())
    if idx < 0:
        return None
    tail = text[idx + len(marker):]
    tail = tail.lstrip().lstrip(":").lstrip()
    tail = tail.rstrip().rstrip(_TRAILING_PUNCT).rstrip()
    return tail or None


def normalize(answer: str) -> NormalizedAnswer:
    """Reduce an answer string to a :class:`NormalizedAnswer`.

    Strips whitespace, currency symbols, thousands separators, and trailing
    periods; converts ``\\frac{a}{b}``, ``a/b``, integers, and decimals to
    exact rationals. A trailing ellipsis marks the value as approximate.
    Anything else passes through as lowercased symbolic text.
    """
    if not answer or not answer.strip():
        raise ValueError("cannot normalize an empty answer")
    s = answer.strip()
    s = s.replace("\\$", "").replace("$", "")
    s = s.lstrip("≈~").strip()
    approximate = False
    for suffix in ("...", "…"):
        if s.endswith(suffix):
            approximate = True
            s = s[: -len(suffix)]
            break
    s = _THOUSANDS_RE.sub("", s)
    s = s.strip().rstrip(".").strip()
    value = _parse_exact(s)
    if value is not None:
        if approximate:
            return NormalizedAnswer(s + "...", value, "decimal-approximate")
        return NormalizedAnswer(str(value), value, "rational")
    canonical = "".join(s.split()).lower()
    if approximate:
        canonical += "..."
    return NormalizedAnswer(canonical, None, "symbolic-text")


def equivalent(a: NormalizedAnswer, b: NormalizedAnswer) -> bool:
    """Whether two normalized answers denote the same value.

    Exact rationals compare exactly; if either side is approximate the
    comparison is within :data:`APPROX_TOLERANCE`; symbolic text compares
    case-insensitively. Numeric never equals symbolic.
    """
    if a.numeric_value is not None and b.numeric_value is not None:
        if a.kind == "rational" and b.kind == "rational":
            return a.numeric_value == b.numeric_value
        return abs(a.numeric_value - b.numeric_value) <= APPROX_TOLERANCE
    if a.numeric_value is None and b.numeric_value is None:
        return a.canonical_text.lower() == b.canonical_text.lower()
    return False


def _parse_exact(s: str) -> Optional[Fraction]:
    m = _LATEX_FRAC_RE.match(s)
    if m:
        den = int(m.group(3))
        if den == 0:
            return None
        value = Fraction(int(m.group(2)), den)
        return -value if m.group(1) else value
    if _SLASH_FRAC_RE.match(s):
        num, den = s.split("/")
        if int(den) == 0:
            return None
        return Fraction(int(num.strip()), int(den.strip()))
    if _INT_RE.match(s):
        return Fraction(int(s))
    if _DECIMAL_RE.match(s):
        try:
            return Fraction(Decimal(s))
        except (InvalidOperation, ValueError):
            return None
    return None
