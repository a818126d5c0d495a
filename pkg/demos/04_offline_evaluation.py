"""Walkthrough: the evaluation harness on the bundled offline dataset.

Run with: python demos/04_offline_evaluation.py
"""

from importlib import resources
from pathlib import Path
from tempfile import TemporaryDirectory

from treesolve import (
    SearchConfig,
    emit_report,
    evaluate,
    load_dataset,
    load_report,
    load_script_file,
    summarize_report,
)

data = resources.files("treesolve").joinpath("data")

problems = load_dataset(Path(str(data / "demo_problems.jsonl")), "generic-jsonl")
print(f"loaded {len(problems)} problems; first: {problems[0].question!r}")

# The bundled script always concludes with 42 and the judge approves
# everything, so only the six 42-answer problems score.
search, judge = load_script_file(Path(str(data / "demo_script.json")))
report = evaluate(problems, SearchConfig(max_depth=3), search, judge)

print(f"accuracy: {report.accuracy:.2f}")
print(f"mean completion tokens: {report.mean_tokens:.1f}")
print(f"candidate-set sizes: {report.candidate_size_histogram}")

with TemporaryDirectory() as out_dir:
    paths = emit_report(report, out_dir)
    print("wrote:", ", ".join(p.name for p in paths))
    print()
    print(summarize_report(load_report(paths[0])))
