"""Prompt rendering for the three expansion actions, the root question
framing, and the answer-verification judge.

Templates live in plain-text files so they can be audited and replaced; a
directory passed via ``--prompts-dir`` (or ``PromptLibrary(directory)``)
overrides the bundled defaults file by file.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Union

from .actions import ActionKind

_PLACEHOLDER_RE = re.compile(r"\{(question|answer|context)\}")

TEMPLATE_FILES: dict[Union[str, ActionKind], str] = {
    "question": "question.txt",
    ActionKind.DISAMBIGUATION: "disambiguation.txt",
    ActionKind.ONE_STEP_FORWARD: "one_step_forward.txt",
    ActionKind.FINAL_ANSWER: "final_answer.txt",
    "verify": "verify.txt",
}


class PromptError(ValueError):
    """A template could not be rendered (unfillable placeholder, empty result)."""


def _bundled(filename: str) -> str:
    return resources.files("treesolve").joinpath("templates", filename).read_text("utf-8")


def _fill(template: str, values: Mapping[str, str]) -> str:
    def substitute(match: re.Match[str]) -> str:
        name = match.group(1)
        if name not in values:
            raise PromptError(f"template placeholder {{{name}}} has no value in this context")
        return values[name]

    rendered = _PLACEHOLDER_RE.sub(substitute, template).strip()
    if not rendered:
        raise PromptError("rendered prompt is empty")
    return rendered


class PromptLibrary:
    """Holds the five templates and renders them.

    Rendering is pure: the same inputs always produce the same text. Braces
    inside filled-in user content pass through untouched.
    """

    def __init__(self, directory: Optional[Union[str, Path]] = None):
        self._templates: dict[Union[str, ActionKind], str] = {}
        for key, filename in TEMPLATE_FILES.items():
            text: Optional[str] = None
            if directory is not None:
                candidate = Path(directory) / filename
                if candidate.is_file():
                    text = candidate.read_text(encoding="utf-8")
            if text is None:
                text = _bundled(filename)
            self._templates[key] = text

    def question_prompt(self, question: str) -> str:
        """The root prompt: the question wrapped in its framing preamble."""
        if not question or not question.strip():
            raise ValueError("question must be nonempty")
        return _fill(self._templates["question"], {"question": question.strip()})

    def action_prompt(self, action: ActionKind) -> str:
        """Instruction text for one expansion action."""
        return _fill(self._templates[ActionKind(action)], {})

    def verify_prompt(self, question: str, answer: str) -> str:
        """Judge prompt embedding the question, then the candidate answer."""
        if not question or not question.strip():
            raise ValueError("question must be nonempty")
        if not answer or not answer.strip():
            raise ValueError("candidate answer must be nonempty")
        return _fill(
            self._templates["verify"],
            {"question": question.strip(), "answer": answer.strip()},
        )


_DEFAULT_LIBRARY = PromptLibrary()


def default_library() -> PromptLibrary:
    return _DEFAULT_LIBRARY


def render_action_prompt(action: ActionKind, library: Optional[PromptLibrary] = None) -> str:
    return (library or _DEFAULT_LIBRARY).action_prompt(action)


def render_verify_prompt(
    question: str, candidate_answer: str, library: Optional[PromptLibrary] = None
) -> str:
    return (library or _DEFAULT_LIBRARY).verify_prompt(question, candidate_answer)


def render_question_prompt(question: str, library: Optional[PromptLibrary] = None) -> str:
    return (library or _DEFAULT_LIBRARY).question_prompt(question)
