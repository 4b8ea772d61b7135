"""Adapter for the SummEval expert-annotation release.

The release ships machine summaries aligned with their source articles as
JSONL: each line carries the article, one model's summary ("decoded"), the
model id, and three expert annotations over four qualities. The adapter
flattens that into PairRecords with ids of the form ``<doc-id>::<model-id>``;
human reference summaries are dropped because scoring here is
reference-free, but the raw per-expert annotations are preserved.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..exceptions import MalformedLineError
from .records import QUALITIES, PairRecord

_TEXT_KEYS = ("text", "source", "article")
_SUMMARY_KEYS = ("decoded", "summary")


def _find_release_file(path: Path) -> Path:
    if path.is_file():
        return path
    candidates = sorted(path.glob("*paired*.jsonl")) or sorted(path.glob("*.jsonl"))
    if not candidates:
        raise FileNotFoundError(f"no .jsonl release file under {path}")
    return candidates[0]


def _first_present(raw: dict, keys: tuple[str, ...]):
    for key in keys:
        if key in raw:
            return raw[key]
    return None


def ingest_summeval(path) -> list[PairRecord]:
    """Read one SummEval release file (or a directory holding it)."""
    release = _find_release_file(Path(path))
    records: list[PairRecord] = []
    seen: set[str] = set()
    with open(release, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(release, line_number, f"invalid JSON: {exc}") from exc
            records.append(_adapt(raw, release, line_number, seen))
    return records


def _adapt(raw: dict, path: Path, line_number: int, seen: set[str]) -> PairRecord:
    doc_id = raw.get("id")
    model_id = raw.get("model_id")
    text = _first_present(raw, _TEXT_KEYS)
    summary = _first_present(raw, _SUMMARY_KEYS)
    annotations = raw.get("expert_annotations")
    if doc_id is None or model_id is None:
        raise MalformedLineError(path, line_number, "missing id or model_id")
    if text is None:
        raise MalformedLineError(path, line_number, f"no source text under any of {_TEXT_KEYS}")
    if summary is None:
        raise MalformedLineError(path, line_number, f"no summary under any of {_SUMMARY_KEYS}")
    if not isinstance(annotations, list) or not annotations:
        raise MalformedLineError(path, line_number, "expert_annotations missing or empty")

    quality_scores: dict[str, list[int]] = {}
    for quality in QUALITIES:
        values: list[int] = []
        for annotation in annotations:
            if quality not in annotation:
                raise MalformedLineError(
                    path, line_number, f"annotation lacks quality {quality!r}"
                )
            value = annotation[quality]
            if float(value) != int(value) or not 1 <= int(value) <= 5:
                raise MalformedLineError(
                    path, line_number, f"quality {quality!r} score {value!r} not an integer in 1..5"
                )
            values.append(int(value))
        quality_scores[quality] = values

    pair_id = f"{doc_id}::{model_id}"
    if pair_id in seen:
        raise MalformedLineError(path, line_number, f"duplicate pair {pair_id!r}")
    seen.add(pair_id)
    return PairRecord(
        id=pair_id,
        text=str(text),
        summary=str(summary),
        system=str(model_id),
        quality_scores=quality_scores,
    )
