"""Independent straight-line recursion used as the structural oracle.

This deliberately re-derives the build rules from scratch (plain dicts,
string action names, no imports from the package under test) so the engine
can be checked node-for-node against it.
"""

from __future__ import annotations

import hashlib

DISAMBIGUATION = "disambiguation"
ONE_STEP = "one_step_forward"
FINAL = "final_answer"
ALL_ACTIONS = (DISAMBIGUATION, ONE_STEP, FINAL)


def reference_tree(
    root_prompt,
    *,
    max_depth,
    one_step_limit,
    value_for,
    actions=ALL_ACTIONS,
    marker="the answer is",
    separator="\n",
):
    """Build the pruned tree by literal recursion; returns flat node dicts in
    creation order (id equals list index)."""
    nodes = []

    def one_steps_on_path(node_id):
        count = 0
        node = nodes[node_id]
        while True:
            if node["action"] == ONE_STEP:
                count += 1
            if node["parent_id"] is None:
                return count
            node = nodes[node["parent_id"]]

    def add(parent_id, depth, action, value, prompt, terminal):
        nodes.append(
            {
                "id": len(nodes),
                "parent_id": parent_id,
                "depth": depth,
                "action": action,
                "value": value,
                "prompt": prompt,
                "terminal": terminal,
            }
        )
        return len(nodes) - 1

    root_id = add(None, 1, None, "", root_prompt, False)

    def build(node_id, depth):
        if depth < max_depth:
            for action in actions:
                if action == DISAMBIGUATION and depth > 1:
                    continue
                if action == ONE_STEP and one_steps_on_path(node_id) >= one_step_limit:
                    continue
                value = value_for(nodes[node_id]["prompt"], action)
                prompt = nodes[node_id]["prompt"] + separator + value
                terminal = marker.lower() in value.lower()
                child_id = add(node_id, depth + 1, action, value, prompt, terminal)
                if terminal:
                    continue
                build(child_id, depth + 1)

    build(root_id, 1)
    return nodes


def hashed_value_fn(seed, terminal_probability):
    """Deterministic generation stub: the value for a call is a pure function
    of (seed, action, context); with per-action probability it carries the
    terminal marker."""

    def value_for(context, action_name, depth=None):
        digest = hashlib.sha256(f"{seed}|{action_name}|{context}".encode()).hexdigest()
        roll = int(digest[:8], 16) / 0xFFFFFFFF
        if roll < terminal_probability.get(action_name, 0.0):
            return f"So we are done. The answer is {int(digest[8:12], 16)}"
        return f"Derived step {digest[:10]}."

    return value_for


def flatten_engine_tree(tree):
    """Flatten a package-built tree into oracle-comparable dicts."""
    from treesolve.tree import iter_nodes

    out = []
    for node in iter_nodes(tree):
        out.append(
            {
                "id": node.id,
                "parent_id": node.parent_id,
                "depth": node.depth,
                "action": node.action.value if node.action is not None else None,
                "value": node.value,
                "prompt": node.prompt,
                "terminal": node.terminal,
            }
        )
    return sorted(out, key=lambda entry: entry["id"])
