"""Python interface to the searchr engine."""

from ._core import (
    ConfigError,
    ContractViolation,
    Error,
    FormatError,
    Index,
    IngestionError,
    ParseError,
    StructuralError,
    UserError,
    answer_score,
    chunk_score,
    chunk_spans,
    clip_ratio,
    descendant_counts,
    normalize_answer,
    normalize_entity,
    ppo_objective,
    reward_model_loss,
    run_cli,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "Error",
    "FormatError",
    "Index",
    "IngestionError",
    "ParseError",
    "StructuralError",
    "UserError",
    "answer_score",
    "chunk_score",
    "chunk_spans",
    "clip_ratio",
    "descendant_counts",
    "normalize_answer",
    "normalize_entity",
    "ppo_objective",
    "reward_model_loss",
    "run_cli",
]
