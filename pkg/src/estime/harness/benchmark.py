"""Clean-vs-corrupted benchmark construction from a clean summary dataset.

Every usable input pair is emitted twice: unchanged with gold_label=1, and
with generated errors under a suffixed id and gold_label=0. Clean pairs come
first, then the corrupted block, mirroring a duplicate-then-corrupt build.
Summaries with too few eligible positions are skipped (both copies) and
reported. Per-pair seeds derive from the configured seed and the pair id,
so output is byte-stable and independent of input order.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

from ..backend.base import Backend
from ..errorgen import ErrorGenConfig, ErrorRecord, generate_errors
from ..exceptions import InsufficientPositionsError, NoCandidateError
from .records import PairRecord

CORRUPTED_SUFFIX = "::err"


@dataclass(frozen=True)
class SkippedPair:
    id: str
    reason: str


@dataclass(frozen=True)
class BenchmarkResult:
    records: list[PairRecord]
    error_records: dict[str, list[ErrorRecord]] = field(default_factory=dict)
    skipped: list[SkippedPair] = field(default_factory=list)


def _pair_seed(base_seed: int, pair_id: str) -> int:
    digest = hashlib.blake2s(
        f"{base_seed}:{pair_id}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


def build_error_benchmark(
    pairs: list[PairRecord],
    config: ErrorGenConfig,
    backend: Backend,
) -> BenchmarkResult:
    clean: list[PairRecord] = []
    corrupted: list[PairRecord] = []
    error_records: dict[str, list[ErrorRecord]] = {}
    skipped: list[SkippedPair] = []

    for pair in pairs:
        pair_config = replace(config, seed=_pair_seed(config.seed, pair.id))
        try:
            bad_summary, records = generate_errors(pair.summary, pair_config, backend)
        except (InsufficientPositionsError, NoCandidateError) as exc:
            skipped.append(SkippedPair(id=pair.id, reason=str(exc)))
            continue
        corrupted_id = pair.id + CORRUPTED_SUFFIX
        clean.append(replace(pair, gold_label=1))
        corrupted.append(
            replace(pair, id=corrupted_id, summary=bad_summary, gold_label=0)
        )
        error_records[corrupted_id] = records

    return BenchmarkResult(
        records=clean + corrupted, error_records=error_records, skipped=skipped
    )
