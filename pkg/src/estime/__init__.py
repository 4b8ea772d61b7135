"""ESTIME: reference-free summary inconsistency scoring.

The score of a (text, summary) pair counts checked summary tokens whose
most-similar masked-token embedding in the text belongs to a different
token. See the scorer module for the algorithm and the harness package for
dataset drivers and the CLI.
"""

from .backend import Backend, MockBackend, TokenSequence, Vocabulary, create_mock_bundle, load_backend
from .errorgen import ErrorGenConfig, ErrorRecord, eligible_positions, generate_errors
from .scorer import (
    EmbeddingTable,
    EstimeConfig,
    EstimeResult,
    MaskingPlan,
    Pass,
    TokenMatch,
    collect_embeddings,
    estime,
    match_and_count,
    plan_masking,
)
from .stats import (
    CorrelationReport,
    ScoreVector,
    average_expert_scores,
    correlation_report,
    kendall_tau_c,
    spearman,
    system_level,
)

__all__ = [
    "Backend",
    "CorrelationReport",
    "EmbeddingTable",
    "ErrorGenConfig",
    "ErrorRecord",
    "EstimeConfig",
    "EstimeResult",
    "MaskingPlan",
    "MockBackend",
    "Pass",
    "ScoreVector",
    "TokenMatch",
    "TokenSequence",
    "Vocabulary",
    "average_expert_scores",
    "collect_embeddings",
    "correlation_report",
    "create_mock_bundle",
    "eligible_positions",
    "estime",
    "generate_errors",
    "kendall_tau_c",
    "load_backend",
    "match_and_count",
    "plan_masking",
    "spearman",
    "system_level",
]

__version__ = "0.1.0"
