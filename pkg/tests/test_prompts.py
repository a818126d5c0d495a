from __future__ import annotations

import re

import pytest

from treesolve.actions import ACTION_ORDER, ActionKind
from treesolve.prompts import (
    PromptError,
    PromptLibrary,
    render_action_prompt,
    render_question_prompt,
    render_verify_prompt,
)

_UNFILLED = re.compile(r"\{(question|answer|context)\}")


def test_final_answer_prompt_demands_the_marker_phrase():
    text = render_action_prompt(ActionKind.FINAL_ANSWER)
    assert "The answer is" in text


def test_disambiguation_prompt_forbids_solving_and_requires_restating():
    text = render_action_prompt(ActionKind.DISAMBIGUATION)
    assert "do not solve" in text.lower()
    assert "rewrit" in text.lower()


def test_one_step_prompt_demands_a_single_step_and_no_answer():
    text = " ".join(render_action_prompt(ActionKind.ONE_STEP_FORWARD).split())
    assert "exactly one" in text.lower()
    assert "do not state the final answer" in text.lower()


def test_question_prompt_embeds_question_verbatim():
    question = "Josh buys a house for $80,000. How much profit did he make?"
    text = render_question_prompt(question)
    assert question in text


def test_verify_prompt_embeds_question_then_answer():
    text = render_verify_prompt("2+2?", "The answer is 4")
    assert "2+2?" in text
    assert "The answer is 4" in text
    assert text.index("2+2?") < text.index("The answer is 4")
    assert "true" in text.lower() and "false" in text.lower()


def test_verify_prompt_keeps_latex_braces_intact():
    text = render_verify_prompt("Compute the ratio.", "The answer is \\frac{21}{43}")
    assert "\\frac{21}{43}" in text


def test_verify_prompt_rejects_empty_inputs():
    with pytest.raises(ValueError):
        render_verify_prompt("2+2?", "   ")
    with pytest.raises(ValueError):
        render_verify_prompt("", "The answer is 4")


def test_no_unfilled_placeholders_anywhere():
    library = PromptLibrary()
    rendered = [library.action_prompt(a) for a in ACTION_ORDER]
    rendered.append(library.question_prompt("What is 2+2?"))
    rendered.append(library.verify_prompt("What is 2+2?", "The answer is 4"))
    for text in rendered:
        assert not _UNFILLED.search(text)


def test_rendering_is_pure():
    assert render_verify_prompt("q?", "a") == render_verify_prompt("q?", "a")
    assert render_action_prompt(ActionKind.ONE_STEP_FORWARD) == render_action_prompt(
        ActionKind.ONE_STEP_FORWARD
    )


def test_directory_overrides_single_template(tmp_path):
    (tmp_path / "final_answer.txt").write_text(
        "Conclude now. End with: The answer is <answer>.", encoding="utf-8"
    )
    library = PromptLibrary(tmp_path)
    assert library.action_prompt(ActionKind.FINAL_ANSWER).startswith("Conclude now.")
    # untouched templates fall back to the bundled defaults
    assert library.action_prompt(ActionKind.DISAMBIGUATION) == PromptLibrary().action_prompt(
        ActionKind.DISAMBIGUATION
    )


def test_unfillable_placeholder_in_custom_template_raises(tmp_path):
    (tmp_path / "one_step_forward.txt").write_text(
        "Take one step given {context}.", encoding="utf-8"
    )
    library = PromptLibrary(tmp_path)
    with pytest.raises(PromptError):
        library.action_prompt(ActionKind.ONE_STEP_FORWARD)


def test_action_kind_order_is_fixed():
    assert [a.value for a in ACTION_ORDER] == [
        "disambiguation",
        "one_step_forward",
        "final_answer",
    ]
    assert len(ActionKind) == 3
    assert list(ActionKind) == list(ACTION_ORDER)
