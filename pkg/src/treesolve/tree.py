"""Pruning search tree over generation calls.

The tree is grown depth-first: every non-terminal node below the depth limit
is expanded once per permitted action, each child's text coming from one
generation call on the parent's accumulated prompt. Three pruning rules keep
the tree small: question rewrites happen only directly under the root,
single-step advances are budgeted per path, and nodes whose text contains the
terminal marker are never expanded. Marker-bearing leaves are the candidate
answers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .actions import ACTION_ORDER, ActionKind
from .answers import TERMINAL_MARKER, extract_final_answer
from .backends import Generator, SamplingParams
from .prompts import PromptLibrary, default_library

# Separator used when appending a node's value to its parent's prompt.
PROMPT_SEPARATOR = "\n"


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the tree build: depth limit, one-step budget, terminal marker,
    and the sampling settings forwarded to the generator."""

    max_depth: int = 7
    one_step_limit: int = 5
    terminal_marker: str = TERMINAL_MARKER
    sampling: SamplingParams = field(default_factory=SamplingParams)

    def __post_init__(self) -> None:
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.one_step_limit < 1:
            raise ValueError("one_step_limit must be >= 1")
        if not self.terminal_marker or not self.terminal_marker.strip():
            raise ValueError("terminal_marker must be nonempty")


@dataclass(eq=False)
class SearchNode:
    """One reasoning state.

    ``prompt`` is the root prompt plus every value on the path down to and
    including this node, joined by :data:`PROMPT_SEPARATOR`; it is the context
    this node's children are generated from. ``value`` is the text generated
    when this node was created (empty for the root and for failed stubs).
    """

    id: int
    depth: int
    action: Optional[ActionKind]
    value: str
    prompt: str
    terminal: bool = False
    children: list["SearchNode"] = field(default_factory=list)
    parent: Optional["SearchNode"] = field(default=None, repr=False)
    error: Optional[str] = None

    @property
    def parent_id(self) -> Optional[int]:
        return self.parent.id if self.parent is not None else None


@dataclass
class SearchTree:
    root: SearchNode
    question: str
    node_count: int
    terminal_marker: str = TERMINAL_MARKER


@dataclass(frozen=True)
class Candidate:
    """A terminal answer: the leaf's full text plus the extracted answer."""

    leaf_id: int
    raw_text: str
    extracted: str
    path_actions: tuple[ActionKind, ...]


def path_action_count(node: SearchNode, action: ActionKind) -> int:
    """Number of edges labeled ``action`` on the root-to-node path, the node's
    own incoming edge included. The root contributes nothing."""
    count = 0
    current: Optional[SearchNode] = node
    while current is not None:
        if current.action == action:
            count += 1
        current = current.parent
    return count


def build_tree(
    question: str,
    config: SearchConfig,
    generator: Generator,
    *,
    actions: Sequence[ActionKind] = ACTION_ORDER,
    prompts: Optional[PromptLibrary] = None,
) -> SearchTree:
    """Grow the full pruned tree for ``question``.

    Expansion happens only while a node's depth is below ``config.max_depth``.
    Per expanded node, children are created in the fixed action order, skipping
    a question rewrite anywhere but at the root and skipping a single-step
    advance once the path already carries ``config.one_step_limit`` of them.
    A child whose value contains the terminal marker (case-insensitive) is
    marked terminal and not expanded. A failed generation call leaves a
    childless stub recording the error; siblings are unaffected.
    """
    if not question or not question.strip():
        raise ValueError("question must be nonempty")
    library = prompts or default_library()
    marker = config.terminal_marker.lower()
    ids = itertools.count()
    root = SearchNode(
        id=next(ids),
        depth=1,
        action=None,
        value="",
        prompt=library.question_prompt(question),
    )
    node_count = 1

    def expand(node: SearchNode) -> None:
        nonlocal node_count
        if node.depth >= config.max_depth:
            return
        for action in actions:
            if action is ActionKind.DISAMBIGUATION and node.depth > 1:
                continue
            if (
                action is ActionKind.ONE_STEP_FORWARD
                and path_action_count(node, action) >= config.one_step_limit
            ):
                continue
            child_depth = node.depth + 1
            try:
                record = generator.generate(
                    node.prompt,
                    library.action_prompt(action),
                    config.sampling,
                    action=action,
                    depth=child_depth,
                )
            except Exception as exc:  # one flaky call must not void the search
                child = SearchNode(
                    id=next(ids),
                    depth=child_depth,
                    action=action,
                    value="",
                    prompt=node.prompt + PROMPT_SEPARATOR,
                    parent=node,
                    error=str(exc),
                )
                node.children.append(child)
                node_count += 1
                continue
            value = record.output
            child = SearchNode(
                id=next(ids),
                depth=child_depth,
                action=action,
                value=value,
                prompt=node.prompt + PROMPT_SEPARATOR + value,
                terminal=marker in value.lower(),
                parent=node,
            )
            node.children.append(child)
            node_count += 1
            if child.terminal:
                continue
            expand(child)

    expand(root)
    return SearchTree(
        root=root,
        question=question,
        node_count=node_count,
        terminal_marker=config.terminal_marker,
    )


def iter_nodes(tree: SearchTree) -> Iterator[SearchNode]:
    """Depth-first preorder walk; identical to node-creation order."""
    yield from _walk(tree.root)


def _walk(node: SearchNode) -> Iterator[SearchNode]:
    yield node
    for child in node.children:
        yield from _walk(child)


def max_tree_depth(tree: SearchTree) -> int:
    return max(node.depth for node in iter_nodes(tree))


def collect_candidates(tree: SearchTree) -> list[Candidate]:
    """Marker-bearing leaves in depth-first order.

    Leaves without the marker (depth-limited frontiers, budget-stunted chains,
    failed stubs) are excluded, as is the rare marker-bearing leaf whose
    extracted answer is empty.
    """
    marker = tree.terminal_marker
    out: list[Candidate] = []

    def visit(node: SearchNode, path: tuple[ActionKind, ...]) -> None:
        if node.children:
            for child in node.children:
                assert child.action is not None
                visit(child, path + (child.action,))
            return
        if marker.lower() in node.value.lower():
            extracted = extract_final_answer(node.value, marker)
            if extracted:
                out.append(Candidate(node.id, node.value, extracted, path))

    visit(tree.root, ())
    return out


def tree_to_dict(tree: SearchTree) -> dict:
    """JSON-ready form of the tree for debugging dumps."""
    nodes = []
    for node in iter_nodes(tree):
        entry: dict = {
            "id": node.id,
            "parent_id": node.parent_id,
            "depth": node.depth,
            "action": node.action.value if node.action is not None else None,
            "value": node.value,
            "terminal": node.terminal,
        }
        if node.error is not None:
            entry["error"] = node.error
        nodes.append(entry)
    nodes.sort(key=lambda e: e["id"])
    return {"question": tree.question, "node_count": tree.node_count, "nodes": nodes}
