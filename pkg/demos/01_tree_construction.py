"""Walkthrough: growing a pruned search tree from a scripted backend.

Run with: python demos/01_tree_construction.py
"""

import json

from treesolve import (
    ActionKind,
    ScriptedBackend,
    SearchConfig,
    build_tree,
    collect_candidates,
    iter_nodes,
    tree_to_dict,
)

# A scripted backend stands in for a live model. Rules key on (action, depth);
# here every final-answer expansion concludes, everything else keeps going.
generator = ScriptedBackend(
    rules={(ActionKind.FINAL_ANSWER, None): "Multiplying gives 42. The answer is 42"},
    default="Break the product into (6 x 7).",
)

config = SearchConfig(max_depth=3)
tree = build_tree("What is 6 times 7?", config, generator)

print(f"built a tree with {tree.node_count} nodes")
print()

# Walk the tree depth-first. Each node's prompt is the root prompt plus every
# value on the path, so deeper nodes see all earlier reasoning.
for node in iter_nodes(tree):
    label = node.action.value if node.action else "root"
    flag = " [terminal]" if node.terminal else ""
    print(f"{'  ' * (node.depth - 1)}#{node.id} {label}{flag}")

print()

# Only marker-bearing leaves become candidate answers. The question rewrite
# branch, the step branch, and the direct conclusion all reach one here.
for candidate in collect_candidates(tree):
    path = " > ".join(a.value for a in candidate.path_actions)
    print(f"candidate from node {candidate.leaf_id}: {candidate.extracted}  (via {path})")

print()
print("JSON dump of the first three nodes:")
print(json.dumps(tree_to_dict(tree)["nodes"][:3], indent=2))
