"""Expansion action vocabulary for the search tree."""

from __future__ import annotations

from enum import Enum


class ActionKind(str, Enum):
    """The three expansion actions, declared in fixed expansion order."""

    DISAMBIGUATION = "disambiguation"
    ONE_STEP_FORWARD = "one_step_forward"
    FINAL_ANSWER = "final_answer"


# Children are always created in this order, which makes depth-first traversal
# (and therefore candidate ordering) deterministic.
ACTION_ORDER: tuple[ActionKind, ...] = (
    ActionKind.DISAMBIGUATION,
    ActionKind.ONE_STEP_FORWARD,
    ActionKind.FINAL_ANSWER,
)
