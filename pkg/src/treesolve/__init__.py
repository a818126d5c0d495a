"""Tree search over a generation backend, with pruning rules, answer
back-verification, majority voting, and a benchmark evaluation harness."""

from .actions import ACTION_ORDER, ActionKind
from .answers import (
    APPROX_TOLERANCE,
    TERMINAL_MARKER,
    NormalizedAnswer,
    equivalent,
    extract_final_answer,
    normalize,
)
from .backends import (
    BackendConfig,
    BackendError,
    ConcurrencyLimiter,
    GenerationRecord,
    Generator,
    HttpChatBackend,
    RecordingGenerator,
    SamplingParams,
    ScriptExhaustedError,
    ScriptedBackend,
    load_script_file,
    scripted_backend,
)
from .config import ConfigError, RunConfig, resolve_config
from .harness import (
    DatasetError,
    EvalReport,
    Problem,
    ProblemResult,
    emit_report,
    evaluate,
    load_dataset,
    load_report,
    summarize_report,
)
from .prompts import (
    PromptError,
    PromptLibrary,
    default_library,
    render_action_prompt,
    render_question_prompt,
    render_verify_prompt,
)
from .tree import (
    PROMPT_SEPARATOR,
    Candidate,
    SearchConfig,
    SearchNode,
    SearchTree,
    build_tree,
    collect_candidates,
    iter_nodes,
    max_tree_depth,
    path_action_count,
    tree_to_dict,
)
from .verification import (
    FinalSelection,
    Verdict,
    back_verify,
    parse_verdict,
    select_answer,
)

__version__ = "0.1.0"

__all__ = [
    "ACTION_ORDER",
    "APPROX_TOLERANCE",
    "ActionKind",
    "BackendConfig",
    "BackendError",
    "Candidate",
    "ConcurrencyLimiter",
    "ConfigError",
    "DatasetError",
    "EvalReport",
    "FinalSelection",
    "GenerationRecord",
    "Generator",
    "HttpChatBackend",
    "NormalizedAnswer",
    "PROMPT_SEPARATOR",
    "Problem",
    "ProblemResult",
    "PromptError",
    "PromptLibrary",
    "RecordingGenerator",
    "RunConfig",
    "SamplingParams",
    "ScriptExhaustedError",
    "ScriptedBackend",
    "SearchConfig",
    "SearchNode",
    "SearchTree",
    "TERMINAL_MARKER",
    "Verdict",
    "back_verify",
    "build_tree",
    "collect_candidates",
    "default_library",
    "emit_report",
    "equivalent",
    "evaluate",
    "extract_final_answer",
    "iter_nodes",
    "load_dataset",
    "load_report",
    "load_script_file",
    "max_tree_depth",
    "normalize",
    "parse_verdict",
    "path_action_count",
    "render_action_prompt",
    "render_question_prompt",
    "render_verify_prompt",
    "resolve_config",
    "scripted_backend",
    "select_answer",
    "summarize_report",
    "tree_to_dict",
    "__version__",
]
