"""Correlation of measure scores against expert annotations.

Summary level correlates one value per pair against the pair's averaged
expert score. System level first averages both sides per system over the
shared texts, then correlates the per-system means. Measures whose raw
value rises with worse quality (inconsistency counts) are declared
negative-sense in their score-file meta and negated before correlating.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from ..exceptions import MissingIdsError
from ..stats import (
    CorrelationReport,
    average_expert_scores,
    correlation_report,
    system_level,
)
from .records import PairRecord, read_scores_jsonl

LEVELS = ("summary", "system")


@dataclass(frozen=True)
class MeasureReport:
    measure: str
    negated: bool
    quality: str
    level: str
    report: CorrelationReport


def _text_key(pair: PairRecord) -> str:
    # pairs sharing a source text form one grid row; key on content so any
    # id scheme works
    return hashlib.blake2s(pair.text.encode("utf-8"), digest_size=8).hexdigest()


def _expert_value(pair: PairRecord, quality: str) -> float:
    if not pair.quality_scores or quality not in pair.quality_scores:
        raise ValueError(f"pair {pair.id!r} has no {quality!r} annotations")
    return average_expert_scores(pair.quality_scores[quality])


def correlate(
    pairs: list[PairRecord],
    score_paths,
    quality: str,
    level: str,
    *,
    permutations: int = 10_000,
    seed: int = 0,
) -> list[MeasureReport]:
    """One correlation report per score file, against one quality."""
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    expert = [_expert_value(p, quality) for p in pairs]

    reports: list[MeasureReport] = []
    for path in score_paths:
        meta, records = read_scores_jsonl(path)
        by_id = {r.id: r.value for r in records}
        missing = [p.id for p in pairs if p.id not in by_id]
        if missing:
            raise MissingIdsError(
                f"{path}: {len(missing)} pair ids missing from score file "
                f"(first few: {missing[:5]})",
                missing=missing,
            )
        sign = -1.0 if meta.negative_sense else 1.0
        values = [sign * by_id[p.id] for p in pairs]

        if level == "summary":
            x, y = values, expert
        else:
            for pair in pairs:
                if pair.system is None:
                    raise ValueError(f"pair {pair.id!r} has no system id; cannot aggregate")
            x = system_level(
                (p.system, _text_key(p), v) for p, v in zip(pairs, values)
            ).values
            y = system_level(
                (p.system, _text_key(p), e) for p, e in zip(pairs, expert)
            ).values

        reports.append(
            MeasureReport(
                measure=meta.measure,
                negated=meta.negative_sense,
                quality=quality,
                level=level,
                report=correlation_report(x, y, permutations=permutations, seed=seed),
            )
        )
    return reports


def report_to_dict(report: MeasureReport) -> dict:
    return {
        "measure": report.measure,
        "negated": report.negated,
        "quality": report.quality,
        "level": report.level,
        "rho": report.report.rho,
        "rho_p": report.report.rho_p,
        "tau_c": report.report.tau_c,
        "tau_p": report.report.tau_p,
        "n": report.report.n,
    }
