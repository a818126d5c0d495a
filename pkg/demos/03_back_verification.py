"""Walkthrough: judging candidates and voting over the survivors.

Run with: python demos/03_back_verification.py
"""

from treesolve import (
    ActionKind,
    ScriptedBackend,
    SearchConfig,
    Verdict,
    back_verify,
    build_tree,
    collect_candidates,
    select_answer,
)

QUESTION = "A recipe needs 21 cups of flour for 43 cookies. How much flour per cookie?"

# The generator plants one wrong conclusion at depth 2 and correct ones below,
# so raw plurality and the judged result disagree.
generator = ScriptedBackend(
    rules={
        (ActionKind.FINAL_ANSWER, 2): "Dividing the wrong way, The answer is \\frac{1}{2}",
        (ActionKind.FINAL_ANSWER, "*"): "Dividing cups by cookies, The answer is \\frac{21}{43}",
    },
    default="Set up the ratio of cups to cookies.",
)

tree = build_tree(QUESTION, SearchConfig(max_depth=3), generator)
candidates = collect_candidates(tree)
print(f"{len(candidates)} candidates:", [c.extracted for c in candidates])

# The judge sees the question next to each candidate's full text and replies
# true or false. This scripted judge knows the truth.
judge = ScriptedBackend(
    default=lambda ctx, action, depth: "true" if "\\frac{21}{43}" in ctx else "false"
)
verdicts = back_verify(QUESTION, candidates, judge)
for candidate, verdict in zip(candidates, verdicts):
    print(f"  node {candidate.leaf_id}: {candidate.extracted:14} judged {verdict.judged_correct}")

selection = select_answer(candidates, verdicts)
print(f"selected: {selection.answer.canonical_text}  votes={selection.vote_counts}")

print()

# If the judge rejects everything, selection falls back to plurality over all
# candidates rather than abstaining.
all_false = [Verdict(v.candidate_ref, False, "false") for v in verdicts]
fallback = select_answer(candidates, all_false)
print(
    f"all-rejected fallback: {fallback.answer.canonical_text}  "
    f"votes={fallback.vote_counts}  used_fallback={fallback.used_fallback}"
)
