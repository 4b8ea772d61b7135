"""Dataset ingestion, batch scoring, benchmark construction and correlation."""

from .benchmark import BenchmarkResult, SkippedPair, build_error_benchmark
from .correlate import MeasureReport, correlate, report_to_dict
from .records import (
    QUALITIES,
    PairRecord,
    ScoreFileMeta,
    ScoreRecord,
    read_pairs_jsonl,
    read_scores_jsonl,
    write_pairs_jsonl,
    write_scores_jsonl,
)
from .scoring import PairFailure, ScoreRun, run_score
from .summeval import ingest_summeval

__all__ = [
    "BenchmarkResult",
    "MeasureReport",
    "PairFailure",
    "PairRecord",
    "QUALITIES",
    "ScoreFileMeta",
    "ScoreRecord",
    "ScoreRun",
    "SkippedPair",
    "build_error_benchmark",
    "correlate",
    "ingest",
    "ingest_summeval",
    "read_pairs_jsonl",
    "read_scores_jsonl",
    "report_to_dict",
    "run_score",
    "write_pairs_jsonl",
    "write_scores_jsonl",
]


def ingest(path, format: str = "pairs-jsonl") -> list[PairRecord]:
    """Read a dataset in one of the supported layouts."""
    if format == "pairs-jsonl":
        return read_pairs_jsonl(path)
    if format == "summeval-adapter":
        return ingest_summeval(path)
    raise ValueError(f"unknown dataset format {format!r}")
