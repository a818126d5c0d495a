"""Walkthrough: pointing the pipeline at a live OpenAI-compatible endpoint.

Needs a running chat-completions server (vLLM, llama.cpp, OpenAI, ...):
    export TREESOLVE_ENDPOINT=http://localhost:8000/v1
    export TREESOLVE_MODEL=your-model-name
    python demos/05_live_endpoint.py
"""

import os
import sys

from treesolve import (
    BackendConfig,
    HttpChatBackend,
    SamplingParams,
    SearchConfig,
    back_verify,
    build_tree,
    collect_candidates,
    select_answer,
)

endpoint = os.environ.get("TREESOLVE_ENDPOINT")
if not endpoint:
    print("set TREESOLVE_ENDPOINT (and optionally TREESOLVE_MODEL) to run this demo")
    sys.exit(0)

QUESTION = (
    "Josh decides to try flipping a house. He buys a house for $80,000 and then "
    "invests $50,000 in repairs. This increased the value of the house by 150%. "
    "How much profit did he make?"
)

config = SearchConfig(max_depth=3, sampling=SamplingParams())  # 0.8 / 0.9 / 2048
backend_config = BackendConfig(
    endpoint_url=endpoint,
    model_name=os.environ.get("TREESOLVE_MODEL", ""),
    max_concurrent_requests=4,
)
search = HttpChatBackend(backend_config, default_params=config.sampling)
judge = HttpChatBackend(backend_config)  # a separate judge endpoint also works

tree = build_tree(QUESTION, config, search)
candidates = collect_candidates(tree)
print(f"tree: {tree.node_count} nodes, {len(candidates)} candidates")
for candidate in candidates:
    print(f"  node {candidate.leaf_id}: {candidate.extracted}")

if candidates:
    verdicts = back_verify(QUESTION, candidates, judge)
    selection = select_answer(candidates, verdicts)
    answer = selection.answer.canonical_text if selection.answer else "none"
    print(f"final answer: {answer}  votes={selection.vote_counts}")
