"""Walkthrough: extracting, normalizing, and comparing final answers.

Run with: python demos/02_answer_normalization.py
"""

from treesolve import equivalent, extract_final_answer, normalize

# Extraction takes whatever follows the last marker phrase, so models may
# restate their conclusion without confusing the harness.
texts = [
    "Thus, The answer is \\frac{1}{2}.",
    "the answer is 5. Wait. The answer is 7",
    "Let me think more.",
]
for text in texts:
    print(f"{text!r:55} -> {extract_final_answer(text)!r}")

print()

# Normalization maps surface forms onto canonical rationals (or lowercased
# symbolic text when nothing numeric parses).
for raw in ["\\frac{21}{43}", "$70,000", "0.50", "2,000,000", "X + 1", "0.333..."]:
    norm = normalize(raw)
    print(f"{raw!r:18} -> {norm.canonical_text!r:12} kind={norm.kind}")

print()

# Equivalence is value-based: "1/2" and "0.5" vote together, while close but
# distinct fractions stay apart.
pairs = [("1/2", "0.5"), ("1/2", "21/43"), ("x+1", "X + 1"), ("0.33333333...", "1/3")]
for left, right in pairs:
    verdict = equivalent(normalize(left), normalize(right))
    print(f"{left!r} == {right!r} ? {verdict}")
