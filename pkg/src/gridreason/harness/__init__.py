from .prompts import PromptSetting, build_prompt
from .provider import ChatClient, CompletionFailed, ProviderConfig, complete
from .runner import RunRecord, load_runs, run_suite

__all__ = [
    "ChatClient",
    "CompletionFailed",
    "PromptSetting",
    "ProviderConfig",
    "RunRecord",
    "build_prompt",
    "complete",
    "load_runs",
    "run_suite",
]
