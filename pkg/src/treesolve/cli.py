"""Command-line interface: solve one question, evaluate a dataset, or
summarize a previously written report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .backends import BackendError, Generator, HttpChatBackend, load_script_file
from .config import ConfigError, RunConfig, resolve_config
from .harness import (
    DATASET_FORMATS,
    DatasetError,
    emit_report,
    evaluate,
    load_dataset,
    load_report,
    summarize_report,
)
from .prompts import PromptLibrary
from .tree import build_tree, collect_candidates, max_tree_depth, tree_to_dict
from .verification import back_verify, select_answer


def _global_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("run options")
    group.add_argument("--config", metavar="PATH", help="flat JSON config file")
    group.add_argument("--prompts-dir", metavar="DIR", help="directory of template overrides")
    group.add_argument(
        "--dump-tree",
        metavar="PATH",
        nargs="?",
        const="-",
        help="write the search tree as JSON ('-' or no value: stdout)",
    )
    group.add_argument("--parallelism", type=int, metavar="N", help="problems evaluated at once")
    group.add_argument(
        "--scripted",
        metavar="PATH",
        help="JSON script file; activates the offline scripted backend",
    )
    group.add_argument("--capture-log", metavar="PATH", help="JSONL request/response capture")
    overrides = parent.add_argument_group("config overrides")
    overrides.add_argument("--max-depth", type=int)
    overrides.add_argument("--one-step-limit", type=int)
    overrides.add_argument("--temperature", type=float)
    overrides.add_argument("--top-p", type=float)
    overrides.add_argument("--max-tokens", type=int)
    overrides.add_argument("--endpoint", metavar="URL", dest="endpoint_url")
    overrides.add_argument("--model", metavar="NAME", dest="model_name")
    overrides.add_argument("--judge-endpoint", metavar="URL", dest="judge_endpoint_url")
    overrides.add_argument("--judge-model", metavar="NAME", dest="judge_model_name")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = _global_flags()
    parser = argparse.ArgumentParser(
        prog="treesolve",
        description="Tree search over a generation backend with answer back-verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[parent], help="answer a single question")
    solve.add_argument("question", help="the question to solve")

    evalp = sub.add_parser("eval", parents=[parent], help="evaluate a JSONL dataset")
    evalp.add_argument("--dataset", required=True, metavar="PATH")
    evalp.add_argument("--format", required=True, choices=DATASET_FORMATS)
    evalp.add_argument("--out", default="reports", metavar="DIR", help="report output directory")

    stats = sub.add_parser("stats", parents=[parent], help="summarize a report.json")
    stats.add_argument("--report", required=True, metavar="PATH")
    return parser


def _resolve(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "max_depth": args.max_depth,
        "one_step_limit": args.one_step_limit,
        "temperature": args.temperature,
        "top_p": args.top_p,
        "max_tokens": args.max_tokens,
        "endpoint_url": args.endpoint_url,
        "model_name": args.model_name,
        "judge_endpoint_url": args.judge_endpoint_url,
        "judge_model_name": args.judge_model_name,
        "parallelism": args.parallelism,
        "prompts_dir": args.prompts_dir,
        "capture_log": args.capture_log,
    }
    return resolve_config(args.config, overrides)


def _make_backends(args: argparse.Namespace, run: RunConfig) -> tuple[Generator, Generator]:
    if args.scripted:
        return load_script_file(args.scripted)
    search = HttpChatBackend(run.search_backend, default_params=run.search.sampling)
    judge = HttpChatBackend(run.judge_backend)
    return search, judge


def _dump_tree(tree_doc: dict, target: str) -> None:
    text = json.dumps(tree_doc, indent=2, ensure_ascii=False)
    if target == "-":
        print(text)
    else:
        Path(target).write_text(text + "\n", encoding="utf-8")


def _tree_dumper(trees_dir: Path):
    """Per-problem tree dump callback for eval's --dump-tree."""
    trees_dir.mkdir(parents=True, exist_ok=True)

    def dump(problem, tree) -> None:
        target = trees_dir / f"{problem.id}.json"
        target.write_text(
            json.dumps(tree_to_dict(tree), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    return dump


def _cmd_solve(args: argparse.Namespace) -> int:
    run = _resolve(args)
    prompts = PromptLibrary(run.prompts_dir)
    search, judge = _make_backends(args, run)
    tree = build_tree(args.question, run.search, search, prompts=prompts)
    if args.dump_tree:
        _dump_tree(tree_to_dict(tree), args.dump_tree)
    if tree.root.children and all(c.error is not None for c in tree.root.children):
        print(
            f"error: every generation call failed; first error: {tree.root.children[0].error}",
            file=sys.stderr,
        )
        return 1
    candidates = collect_candidates(tree)
    verdicts = back_verify(args.question, candidates, judge, prompts=prompts) if candidates else []
    final = select_answer(candidates, verdicts)

    print(f"question: {args.question}")
    print(
        f"nodes: {tree.node_count}  max depth: {max_tree_depth(tree)}  "
        f"candidates: {len(candidates)}"
    )
    for candidate, verdict in zip(candidates, verdicts):
        path = " > ".join(a.value for a in candidate.path_actions)
        print(
            f"  [node {candidate.leaf_id}] {candidate.extracted}  "
            f"(path: {path}, verdict: {'true' if verdict.judged_correct else 'false'})"
        )
    if final.answer is not None:
        print(f"answer: {final.answer.canonical_text}")
        votes = " ".join(f"{text}={n}" for text, n in final.vote_counts.items())
        print(f"votes: {votes}")
        print(f"fallback: {'yes' if final.used_fallback else 'no'}")
    else:
        print("answer: none (no candidates)")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    run = _resolve(args)
    prompts = PromptLibrary(run.prompts_dir)
    search, judge = _make_backends(args, run)
    problems = load_dataset(args.dataset, args.format)
    if not problems:
        print(f"error: dataset {args.dataset} holds no problems", file=sys.stderr)
        return 1
    on_tree = _tree_dumper(Path(args.out) / "trees") if args.dump_tree else None
    report = evaluate(
        problems,
        run.search,
        search,
        judge,
        parallelism=run.parallelism,
        prompts=prompts,
        on_tree=on_tree,
    )
    paths = emit_report(report, args.out)
    print(f"evaluated {len(problems)} problems")
    print(f"accuracy: {report.accuracy:.4f}")
    print(f"mean completion tokens: {report.mean_tokens:.1f}")
    print("wrote " + ", ".join(str(p) for p in paths))
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    document = load_report(args.report)
    print(summarize_report(document))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"solve": _cmd_solve, "eval": _cmd_eval, "stats": _cmd_stats}
    try:
        return handlers[args.command](args)
    except (ConfigError, DatasetError, FileNotFoundError, BackendError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
