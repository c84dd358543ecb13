"""Benchmark harness for LLM code generation against a vehicle-signal API.

Assembles system prompts over a signal catalog, queries models under three
prompting modes through a record/replay cache, and scores the generated
scripts with CodeBLEU, CodeBERTScore, ROUGE-L and ChrF.
"""

from pathlib import Path

from .benchmark import (
    Benchmark,
    BenchmarkError,
    BenchmarkItem,
    Complexity,
    UseCase,
    Violation,
    filter_benchmark,
    load_benchmark,
    save_benchmark,
    validate_benchmark,
)
from .catalog import (
    ApiEntry,
    CatalogError,
    NodeKind,
    SignalNode,
    SignalTree,
    flatten,
    load_catalog,
    parse_catalog,
    render_api_listing,
    resolve_path,
    serialize_catalog,
)
from .gateway import (
    CompletionRecord,
    Gateway,
    GatewayError,
    ModelSpec,
    OfflineCacheMiss,
    ProviderError,
    RateLimitError,
    extract_code_block,
    regenerate_on_invalid,
)
from .metrics import CodeBleuWeights, HashEmbedder, MetricReport, score_pair
from .prompts import (
    ExemplarProblem,
    Mode,
    PromptBundle,
    PromptConfig,
    PromptError,
    PromptSection,
    SectionKind,
    SystemPrompt,
    assemble,
    estimate_tokens,
    load_bundle,
    select_sections,
)
from .runner import (
    AggregateRow,
    EvalContext,
    RunConfig,
    RunMatrix,
    RunResult,
    SignificanceResult,
    Technique,
    ablate,
    aggregate,
    compare,
    compare_to_null,
    load_results,
    render_report,
    run,
    save_results,
)
from .stats import paired_t, wilcoxon_signed_rank

__version__ = "0.1.0"

#: Shipped fixtures: catalog, prompt bundle, benchmark, recorded cache, run config.
DATA_DIR = Path(__file__).parent / "data"

__all__ = [
    "DATA_DIR",
    "AggregateRow",
    "ApiEntry",
    "Benchmark",
    "BenchmarkError",
    "BenchmarkItem",
    "CatalogError",
    "CodeBleuWeights",
    "Complexity",
    "CompletionRecord",
    "EvalContext",
    "ExemplarProblem",
    "Gateway",
    "GatewayError",
    "HashEmbedder",
    "MetricReport",
    "Mode",
    "ModelSpec",
    "NodeKind",
    "OfflineCacheMiss",
    "PromptBundle",
    "PromptConfig",
    "PromptError",
    "PromptSection",
    "ProviderError",
    "RateLimitError",
    "RunConfig",
    "RunMatrix",
    "RunResult",
    "SectionKind",
    "SignalNode",
    "SignalTree",
    "SignificanceResult",
    "SystemPrompt",
    "Technique",
    "UseCase",
    "Violation",
    "ablate",
    "aggregate",
    "assemble",
    "compare",
    "compare_to_null",
    "estimate_tokens",
    "extract_code_block",
    "filter_benchmark",
    "flatten",
    "load_benchmark",
    "load_bundle",
    "load_catalog",
    "load_results",
    "paired_t",
    "parse_catalog",
    "regenerate_on_invalid",
    "render_api_listing",
    "render_report",
    "resolve_path",
    "run",
    "save_benchmark",
    "save_results",
    "score_pair",
    "select_sections",
    "serialize_catalog",
    "validate_benchmark",
    "wilcoxon_signed_rank",
]
