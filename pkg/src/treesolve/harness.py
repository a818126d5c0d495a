"""Dataset loading, the end-to-end evaluation pipeline, and report emission."""

from __future__ import annotations

import csv
import json
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, Union

from .answers import equivalent, normalize
from .backends import Generator, RecordingGenerator
from .prompts import PromptLibrary, default_library
from .tree import SearchConfig, SearchTree, build_tree, collect_candidates
from .verification import FinalSelection, back_verify, select_answer

DATASET_FORMATS = ("generic-jsonl", "gsm8k-jsonl", "math-jsonl")


class DatasetError(ValueError):
    """A dataset file could not be parsed into problems."""


@dataclass(frozen=True)
class Problem:
    id: str
    question: str
    gold_answer: str
    source: str


@dataclass
class ProblemResult:
    problem_id: str
    final: FinalSelection
    correct: bool
    total_completion_tokens: int
    candidate_count: int
    wall_ms: int
    error: Optional[str] = None


@dataclass
class EvalReport:
    per_problem: list[ProblemResult]
    accuracy: float
    mean_tokens: float
    candidate_size_histogram: dict[int, int]
    config_snapshot: dict[str, Any]


# ---------------------------------------------------------------------------
# Dataset loading
# ---------------------------------------------------------------------------


def _field(obj: dict, names: Sequence[str], lineno: int, path: str) -> str:
    for name in names:
        value = obj.get(name)
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = str(value)
        if isinstance(value, str) and value.strip():
            return value
    raise DatasetError(f"{path}: line {lineno}: missing field {names[0]!r}")


def _last_boxed(text: str) -> Optional[str]:
    idx = text.rfind("\\boxed")
    if idx < 0:
        return None
    i = text.find("{", idx)
    if i < 0:
        return None
    depth = 0
    for j in range(i, len(text)):
        if text[j] == "{":
            depth += 1
        elif text[j] == "}":
            depth -= 1
            if depth == 0:
                return text[i + 1 : j].strip() or None
    return None


def load_dataset(path: Union[str, Path], format: str) -> list[Problem]:
    """Parse a JSONL dataset file into problems.

    generic-jsonl maps {id?, question|problem, answer|gold}. gsm8k-jsonl takes
    the text after the final "#### " of the answer field as the gold answer.
    math-jsonl takes the content of the last \\boxed{...} in the solution
    field. Errors name the offending line and field.
    """
    if format not in DATASET_FORMATS:
        raise DatasetError(f"unknown dataset format {format!r}; expected one of {DATASET_FORMATS}")
    source = {"generic-jsonl": "generic", "gsm8k-jsonl": "gsm8k", "math-jsonl": "math"}[format]
    path = Path(path)
    problems: list[Problem] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}: line {lineno}: malformed JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise DatasetError(f"{path}: line {lineno}: expected a JSON object")

            if format == "gsm8k-jsonl":
                question = _field(obj, ("question", "problem"), lineno, str(path))
                answer = _field(obj, ("answer", "gold"), lineno, str(path))
                rationale, sep, gold = answer.rpartition("#### ")
                del rationale
                if not sep or not gold.strip():
                    raise DatasetError(
                        f"{path}: line {lineno}: answer field lacks a '#### ' final-answer delimiter"
                    )
                gold = gold.strip()
            elif format == "math-jsonl":
                question = _field(obj, ("problem", "question"), lineno, str(path))
                solution = _field(obj, ("solution",), lineno, str(path))
                boxed = _last_boxed(solution)
                if boxed is None:
                    raise DatasetError(
                        f"{path}: line {lineno}: solution field has no \\boxed{{...}} answer"
                    )
                gold = boxed
            else:
                question = _field(obj, ("question", "problem"), lineno, str(path))
                gold = _field(obj, ("answer", "gold"), lineno, str(path))

            raw_id = obj.get("id")
            problem_id = str(raw_id) if raw_id not in (None, "") else f"p{lineno}"
            if problem_id in seen_ids:
                raise DatasetError(f"{path}: line {lineno}: duplicate problem id {problem_id!r}")
            seen_ids.add(problem_id)
            problems.append(Problem(problem_id, question, gold, source))
    return problems


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _describe_backend(backend: Any) -> dict[str, Any]:
    describe = getattr(backend, "describe", None)
    if callable(describe):
        return describe()
    return {"kind": type(backend).__name__}


def _config_snapshot(
    config: SearchConfig, search_backend: Any, judge_backend: Any, parallelism: int
) -> dict[str, Any]:
    return {
        "max_depth": config.max_depth,
        "one_step_limit": config.one_step_limit,
        "terminal_marker": config.terminal_marker,
        "sampling": {
            "temperature": config.sampling.temperature,
            "top_p": config.sampling.top_p,
            "max_tokens": config.sampling.max_tokens,
            "seed": config.sampling.seed,
        },
        "search_backend": _describe_backend(search_backend),
        "judge_backend": _describe_backend(judge_backend),
        "parallelism": parallelism,
    }


def evaluate(
    problems: Sequence[Problem],
    search_cfg: SearchConfig,
    search_backend: Generator,
    judge_backend: Generator,
    *,
    parallelism: int = 1,
    prompts: Optional[PromptLibrary] = None,
    on_tree: Optional[Callable[[Problem, SearchTree], None]] = None,
) -> EvalReport:
    """Run the full pipeline on every problem and aggregate.

    Per problem: build the tree, collect candidates, back-verify, select the
    answer, and score it against the gold answer by normalized equivalence.
    One problem's failure never aborts the run; its result carries the error
    and counts as incorrect. Problems run concurrently up to ``parallelism``;
    the report always follows input order. ``on_tree``, when given, is called
    with each problem's finished tree (used for debugging dumps).
    """
    if not problems:
        raise ValueError("evaluate requires at least one problem")
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    library = prompts or default_library()

    def run(problem: Problem) -> ProblemResult:
        search_rec = RecordingGenerator(search_backend)
        judge_rec = RecordingGenerator(judge_backend)
        started = time.perf_counter()
        candidate_count = 0
        try:
            tree = build_tree(problem.question, search_cfg, search_rec, prompts=library)
            if on_tree is not None:
                on_tree(problem, tree)
            candidates = collect_candidates(tree)
            candidate_count = len(candidates)
            verdicts = (
                back_verify(problem.question, candidates, judge_rec, prompts=library)
                if candidates
                else []
            )
            final = select_answer(candidates, verdicts)
            correct = final.answer is not None and equivalent(
                final.answer, normalize(problem.gold_answer)
            )
            error = None
        except Exception as exc:
            final, correct, error = FinalSelection(answer=None), False, str(exc)
        wall_ms = int((time.perf_counter() - started) * 1000)
        tokens = search_rec.total_completion_tokens + judge_rec.total_completion_tokens
        return ProblemResult(
            problem_id=problem.id,
            final=final,
            correct=correct,
            total_completion_tokens=tokens,
            candidate_count=candidate_count,
            wall_ms=wall_ms,
            error=error,
        )

    if parallelism == 1:
        results = [run(p) for p in problems]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(run, problems))

    accuracy = sum(1 for r in results if r.correct) / len(results)
    mean_tokens = sum(r.total_completion_tokens for r in results) / len(results)
    histogram = dict(sorted(Counter(r.candidate_count for r in results).items()))
    return EvalReport(
        per_problem=results,
        accuracy=accuracy,
        mean_tokens=mean_tokens,
        candidate_size_histogram=histogram,
        config_snapshot=_config_snapshot(search_cfg, search_backend, judge_backend, parallelism),
    )


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def _selection_to_dict(final: FinalSelection) -> dict[str, Any]:
    return {
        "answer": final.answer.canonical_text if final.answer is not None else None,
        "answer_kind": final.answer.kind if final.answer is not None else None,
        "vote_counts": dict(final.vote_counts),
        "used_fallback": final.used_fallback,
    }


def report_to_dict(report: EvalReport) -> dict[str, Any]:
    return {
        "accuracy": report.accuracy,
        "mean_tokens": report.mean_tokens,
        "candidate_size_histogram": {
            str(size): count for size, count in report.candidate_size_histogram.items()
        },
        "config_snapshot": report.config_snapshot,
        "per_problem": [
            {
                "problem_id": r.problem_id,
                "correct": r.correct,
                "candidate_count": r.candidate_count,
                "total_completion_tokens": r.total_completion_tokens,
                "wall_ms": r.wall_ms,
                "error": r.error,
                "final": _selection_to_dict(r.final),
            }
            for r in report.per_problem
        ],
    }


def emit_report(report: EvalReport, out_dir: Union[str, Path]) -> list[Path]:
    """Write report.json, summary.csv (one row per problem), and
    histogram.csv (candidate-set sizes) under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    document = {"timestamp": datetime.now(timezone.utc).isoformat(), **report_to_dict(report)}

    report_path = out / "report.json"
    report_path.write_text(
        json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )

    summary_path = out / "summary.csv"
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["problem_id", "correct", "candidate_count", "completion_tokens", "wall_ms", "answer"]
        )
        for r in report.per_problem:
            writer.writerow(
                [
                    r.problem_id,
                    int(r.correct),
                    r.candidate_count,
                    r.total_completion_tokens,
                    r.wall_ms,
                    r.final.answer.canonical_text if r.final.answer is not None else "",
                ]
            )

    histogram_path = out / "histogram.csv"
    with open(histogram_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["candidate_count", "problems"])
        for size, count in sorted(report.candidate_size_histogram.items()):
            writer.writerow([size, count])

    return [report_path, summary_path, histogram_path]


def load_report(path: Union[str, Path]) -> dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def summarize_report(document: dict[str, Any]) -> str:
    """Human-readable aggregate view of a report, recomputed from its rows."""
    rows = document.get("per_problem", [])
    if not rows:
        return "report holds no problems"
    accuracy = sum(1 for r in rows if r["correct"]) / len(rows)
    mean_tokens = sum(r["total_completion_tokens"] for r in rows) / len(rows)
    histogram = Counter(r["candidate_count"] for r in rows)
    lines = [
        f"problems: {len(rows)}",
        f"accuracy: {accuracy:.4f}",
        f"mean completion tokens: {mean_tokens:.1f}",
        "candidate-set sizes:",
    ]
    lines += [f"  {size}: {count}" for size, count in sorted(histogram.items())]
    stored = document.get("accuracy")
    if stored is not None and abs(stored - accuracy) > 1e-9:
        lines.append(f"warning: stored accuracy {stored:.4f} disagrees with rows")
    return "\n".join(lines)
