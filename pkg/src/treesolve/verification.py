"""Back-verification of candidate answers and majority voting.

Each candidate is re-submitted to a judge backend together with the original
question; the judge's true/false verdicts gate which candidates may vote. The
final answer is the plurality over equivalence classes of normalized answers
among approved candidates, falling back to all candidates when the judge
approves none.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .answers import NormalizedAnswer, equivalent, normalize
from .backends import Generator
from .prompts import PromptLibrary, default_library
from .tree import Candidate

_VERDICT_RE = re.compile(r"\b(true|false)\b", re.IGNORECASE)


def parse_verdict(raw_judgment: str) -> bool:
    """Lenient true/false reading: the first standalone "true" or "false"
    wins; anything unparseable counts as false."""
    match = _VERDICT_RE.search(raw_judgment)
    return match is not None and match.group(1).lower() == "true"


@dataclass(frozen=True)
class Verdict:
    candidate_ref: int
    judged_correct: bool
    raw_judgment: str


@dataclass
class FinalSelection:
    answer: Optional[NormalizedAnswer]
    vote_counts: dict[str, int] = field(default_factory=dict)
    used_fallback: bool = False


def back_verify(
    question: str,
    candidates: Sequence[Candidate],
    judge: Generator,
    *,
    prompts: Optional[PromptLibrary] = None,
) -> list[Verdict]:
    """One judge call per candidate, order-preserving.

    The judge receives the rendered verification prompt (question, then the
    candidate's full text) as a single user message. A judge failure yields a
    false verdict carrying the error; remaining candidates are still judged.
    """
    library = prompts or default_library()
    verdicts: list[Verdict] = []
    for candidate in candidates:
        prompt = library.verify_prompt(question, candidate.raw_text)
        try:
            record = judge.generate(prompt)
        except Exception as exc:
            verdicts.append(Verdict(candidate.leaf_id, False, f"judge error: {exc}"))
            continue
        verdicts.append(
            Verdict(candidate.leaf_id, parse_verdict(record.output), record.output)
        )
    return verdicts


def select_answer(
    candidates: Sequence[Candidate], verdicts: Sequence[Verdict]
) -> FinalSelection:
    """Plurality over equivalence classes of normalized answers.

    Only judge-approved candidates vote; if the judge approved none, all
    candidates vote and ``used_fallback`` is set. Ties break toward the class
    whose first member appears earliest in depth-first candidate order. An
    empty candidate list yields an absent answer.
    """
    if len(candidates) != len(verdicts):
        raise ValueError(
            f"candidates ({len(candidates)}) and verdicts ({len(verdicts)}) are misaligned"
        )
    if not candidates:
        return FinalSelection(answer=None)
    approved = [c for c, v in zip(candidates, verdicts) if v.judged_correct]
    used_fallback = not approved
    pool = list(candidates) if used_fallback else approved

    representatives: list[NormalizedAnswer] = []
    counts: list[int] = []
    for candidate in pool:
        norm = normalize(candidate.extracted)
        for i, representative in enumerate(representatives):
            if equivalent(representative, norm):
                counts[i] += 1
                break
        else:
            representatives.append(norm)
            counts.append(1)

    best = max(range(len(representatives)), key=lambda i: counts[i])
    vote_counts = {rep.canonical_text: n for rep, n in zip(representatives, counts)}
    return FinalSelection(
        answer=representatives[best],
        vote_counts=vote_counts,
        used_fallback=used_fallback,
    )
