"""Dataset and score-file records plus their JSONL serialization.

pairs-jsonl: one JSON object per line with the PairRecord fields (UTF-8,
LF line endings). scores-jsonl: a meta header line followed by one record
per (id, measure). Writers emit keys in a fixed order so re-running a
deterministic pipeline reproduces files byte for byte.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..exceptions import MalformedLineError

QUALITIES = ("consistency", "relevance", "coherence", "fluency")


@dataclass(frozen=True)
class PairRecord:
    """One (text, summary) pair, optionally annotated."""

    id: str
    text: str
    summary: str
    system: str | None = None
    quality_scores: dict[str, list[int]] | None = None
    gold_label: int | None = None


@dataclass(frozen=True)
class ScoreRecord:
    """One measure value for one pair."""

    id: str
    measure: str
    value: float
    detail: dict | None = None


@dataclass(frozen=True)
class ScoreFileMeta:
    measure: str
    negative_sense: bool = False
    config: dict = field(default_factory=dict)


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False)


def _validate_pair(raw: dict, path, line_number: int) -> PairRecord:
    try:
        pair_id = raw["id"]
        text = raw["text"]
        summary = raw["summary"]
    except KeyError as exc:
        raise MalformedLineError(path, line_number, f"missing field {exc}") from exc
    if not isinstance(pair_id, str) or not isinstance(text, str) or not isinstance(summary, str):
        raise MalformedLineError(path, line_number, "id, text and summary must be strings")

    quality_scores = raw.get("quality_scores")
    if quality_scores is not None:
        for quality, values in quality_scores.items():
            if not isinstance(values, list) or not values:
                raise MalformedLineError(
                    path, line_number, f"quality {quality!r} must hold a non-empty list"
                )

    gold_label = raw.get("gold_label")
    if gold_label is not None and gold_label not in (0, 1):
        raise MalformedLineError(path, line_number, f"gold_label must be 0 or 1, got {gold_label!r}")

    return PairRecord(
        id=pair_id,
        text=text,
        summary=summary,
        system=raw.get("system"),
        quality_scores=quality_scores,
        gold_label=gold_label,
    )


def read_pairs_jsonl(path) -> list[PairRecord]:
    records: list[PairRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(path, line_number, f"invalid JSON: {exc}") from exc
            record = _validate_pair(raw, path, line_number)
            if record.id in seen:
                raise MalformedLineError(path, line_number, f"duplicate id {record.id!r}")
            seen.add(record.id)
            records.append(record)
    return records


def pair_to_dict(record: PairRecord) -> dict:
    out: dict = {"id": record.id, "text": record.text, "summary": record.summary}
    if record.system is not None:
        out["system"] = record.system
    if record.quality_scores is not None:
        out["quality_scores"] = record.quality_scores
    if record.gold_label is not None:
        out["gold_label"] = record.gold_label
    return out


def write_pairs_jsonl(path, records: Iterable[PairRecord]) -> None:
    _atomic_write_lines(path, (_dump(pair_to_dict(r)) for r in records))


def score_to_dict(record: ScoreRecord) -> dict:
    out: dict = {"id": record.id, "measure": record.measure, "value": record.value}
    if record.detail is not None:
        out["detail"] = record.detail
    return out


def _score_from_dict(raw: dict, path, line_number: int) -> ScoreRecord:
    try:
        return ScoreRecord(
            id=raw["id"],
            measure=raw["measure"],
            value=float(raw["value"]),
            detail=raw.get("detail"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedLineError(path, line_number, f"invalid score record: {exc}") from exc


def read_scores_jsonl(path) -> tuple[ScoreFileMeta, list[ScoreRecord]]:
    meta: ScoreFileMeta | None = None
    records: list[ScoreRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(path, line_number, f"invalid JSON: {exc}") from exc
            if "meta" in raw:
                if meta is not None:
                    raise MalformedLineError(path, line_number, "duplicate meta header")
                m = raw["meta"]
                meta = ScoreFileMeta(
                    measure=m["measure"],
                    negative_sense=bool(m.get("negative_sense", False)),
                    config=m.get("config", {}),
                )
                continue
            record = _score_from_dict(raw, path, line_number)
            if record.id in seen:
                raise MalformedLineError(path, line_number, f"duplicate id {record.id!r}")
            seen.add(record.id)
            records.append(record)
    if meta is None:
        raise MalformedLineError(path, 1, "missing meta header line")
    return meta, records


def write_scores_jsonl(path, meta: ScoreFileMeta, records: Iterable[ScoreRecord]) -> None:
    header = _dump(
        {"meta": {"measure": meta.measure, "negative_sense": meta.negative_sense, "config": meta.config}}
    )
    lines = [header]
    lines.extend(_dump(score_to_dict(r)) for r in records)
    _atomic_write_lines(path, lines)


def _atomic_write_lines(path, lines: Iterable[str]) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line)
            handle.write("\n")
    os.replace(tmp, path)
