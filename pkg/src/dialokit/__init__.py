"""Toolkit for building instruction-tuning datasets for tool-calling agents.

Covers the full path from raw corpora to a mixed training set: state-tracking
and function-calling transforms, LLM-driven reasoning-dialogue generation,
four-dimension automatic validation with a human-review protocol, dataset
mixing and stats, transcript evaluation, a CLI, and an HTTP annotation
backend.
"""

from .calls import (
    CallMatchPolicy,
    DEFAULT_POLICY,
    ast_equal,
    match_call_sets,
    parse_call,
    parse_literal,
    parse_toolcall_json,
    render_call,
    render_toolcall_json,
    render_value,
)
from .config import ConfigError, GenerationSettings, PipelineConfig, load_config
from .errors import LintWarning, ParseError, ToolkitError
from .generate import (
    GenParams,
    GenerationFailed,
    HttpGenerationClient,
    ReplayClient,
    SeedDialogue,
    TransportError,
    build_generation_prompt,
    generate_corpus,
    generate_cra,
    split_turn_samples,
)
from .metrics import (
    EvalRecord,
    bleu4,
    evaluate_transcripts,
    jga,
    relevance_detection,
    rouge,
)
from .mixer import (
    DatasetStats,
    MixPlan,
    MixSource,
    dataset_stats,
    emit_jsonl,
    interleave,
    read_jsonl,
)
from .model import (
    ApiCall,
    DialogueState,
    DomainTag,
    FunctionRegistry,
    FunctionSchema,
    InstructionSample,
    ParamSpec,
    ReactDialogue,
    ReactTurn,
    ValueType,
    load_compact_registry,
    load_registry,
    validate_call_against_schema,
)
from .pipeline import PipelineResult, StageError, run_pipeline
from .react import parse_trace, render_history, render_turn
from .rng import Xoshiro256StarStar, derive_seed
from .transforms import (
    MaskMap,
    build_fc_sample,
    mask_names,
    parse_dst_output,
    snips_to_dst,
)
from .validate import (
    ErrorDimension,
    HumanScore,
    ValidationFlag,
    ValidationReport,
    check_corpus,
    check_dialogue,
    error_rate_report,
    sample_for_review,
)

__version__ = "0.1.0"

__all__ = [
    "ApiCall",
    "CallMatchPolicy",
    "ConfigError",
    "DEFAULT_POLICY",
    "DatasetStats",
    "DialogueState",
    "DomainTag",
    "ErrorDimension",
    "EvalRecord",
    "FunctionRegistry",
    "FunctionSchema",
    "GenParams",
    "GenerationFailed",
    "GenerationSettings",
    "HttpGenerationClient",
    "HumanScore",
    "InstructionSample",
    "LintWarning",
    "MaskMap",
    "MixPlan",
    "MixSource",
    "ParamSpec",
    "ParseError",
    "PipelineConfig",
    "PipelineResult",
    "ReactDialogue",
    "ReactTurn",
    "ReplayClient",
    "SeedDialogue",
    "StageError",
    "ToolkitError",
    "TransportError",
    "ValidationFlag",
    "ValidationReport",
    "ValueType",
    "Xoshiro256StarStar",
    "ast_equal",
    "bleu4",
    "build_fc_sample",
    "build_generation_prompt",
    "check_corpus",
    "check_dialogue",
    "dataset_stats",
    "derive_seed",
    "emit_jsonl",
    "error_rate_report",
    "evaluate_transcripts",
    "generate_corpus",
    "generate_cra",
    "interleave",
    "jga",
    "load_compact_registry",
    "load_config",
    "load_registry",
    "mask_names",
    "match_call_sets",
    "parse_call",
    "parse_dst_output",
    "parse_literal",
    "parse_toolcall_json",
    "parse_trace",
    "read_jsonl",
    "relevance_detection",
    "render_call",
    "render_history",
    "render_toolcall_json",
    "render_turn",
    "render_value",
    "rouge",
    "run_pipeline",
    "sample_for_review",
    "snips_to_dst",
    "split_turn_samples",
    "validate_call_against_schema",
]
