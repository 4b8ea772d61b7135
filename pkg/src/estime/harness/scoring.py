"""Batch scoring over a pair dataset, resumable and worker-parallel.

Completed pairs are appended to an on-disk progress journal as they finish;
re-running skips everything already journalled (or already present in a
finished output file with the same measure and config). The final file is
written in input order once all pairs are done, so its bytes are identical
whatever the worker count or interruption history.
"""

from __future__ import annotations

import json
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from ..backend.base import Backend
from ..scorer import (
    EstimeConfig,
    collect_embeddings,
    match_and_count,
    plan_masking,
    validate_config_for_backend,
)

# source texts repeat across systems in annotation datasets; keeping a few
# text embedding tables per worker roughly halves the forward passes there
_TEXT_CACHE_SIZE = 8
from .records import (
    PairRecord,
    ScoreFileMeta,
    ScoreRecord,
    read_scores_jsonl,
    score_to_dict,
    write_scores_jsonl,
)


@dataclass(frozen=True)
class PairFailure:
    id: str
    error: str


@dataclass(frozen=True)
class ScoreRun:
    records: list[ScoreRecord]
    failures: list[PairFailure] = field(default_factory=list)
    computed_ids: list[str] = field(default_factory=list)  # scored in this run


def _meta_header(meta: ScoreFileMeta) -> dict:
    return {
        "meta": {
            "measure": meta.measure,
            "negative_sense": meta.negative_sense,
            "config": meta.config,
        }
    }


def _read_journal(path: Path, meta: ScoreFileMeta) -> tuple[bool, dict[str, ScoreRecord]]:
    """Load completed records from a journal, ignoring a torn final line.

    Returns (header_valid, records). A journal written under a different
    measure or config is reported invalid and its records discarded.
    """
    completed: dict[str, ScoreRecord] = {}
    if not path.exists():
        return False, completed
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines:
        return False, completed
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError:
        return False, completed
    if header.get("meta") != _meta_header(meta)["meta"]:
        return False, completed
    for line in lines[1:]:
        try:
            raw = json.loads(line)
            record = ScoreRecord(
                id=raw["id"], measure=raw["measure"], value=raw["value"], detail=raw.get("detail")
            )
        except (json.JSONDecodeError, KeyError):
            break  # torn tail from an interrupted write
        completed[record.id] = record
    return True, completed


def _result_detail(result, include_matches: bool) -> dict:
    detail: dict = {"num_checked": result.num_checked}
    if include_matches:
        detail["matches"] = [
            {
                "summary_pos": m.summary_pos,
                "text_pos": m.text_pos,
                "summary_token": m.summary_token,
                "text_token": m.text_token,
                "similarity": m.similarity,
            }
            for m in result.matches
        ]
    return detail


def run_score(
    pairs: Sequence[PairRecord],
    config: EstimeConfig,
    backend_factory: Callable[[], Backend],
    out_path,
    *,
    measure: str | None = None,
    workers: int = 1,
    include_matches: bool = False,
) -> ScoreRun:
    """Score every pair and write a scores-jsonl file.

    ``backend_factory`` is called once per worker thread (backends need not
    be thread-safe). Per-pair backend failures are recorded and skipped;
    the caller decides how loudly to fail.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    measure = measure or f"estime-{config.layer_h}"
    config_dict = dict(asdict(config), include_matches=include_matches)
    meta = ScoreFileMeta(measure=measure, negative_sense=True, config=config_dict)

    out_path = Path(out_path)
    journal_path = out_path.with_name(out_path.name + ".progress")

    completed: dict[str, ScoreRecord] = {}
    if out_path.exists():
        try:
            prior_meta, prior_records = read_scores_jsonl(out_path)
        except Exception:
            prior_meta, prior_records = None, []
        if prior_meta is not None and _meta_header(prior_meta) == _meta_header(meta):
            completed.update({r.id: r for r in prior_records})
    journal_valid, journalled = _read_journal(journal_path, meta)
    completed.update(journalled)

    pending = [p for p in pairs if p.id not in completed]
    failures: list[PairFailure] = []
    computed_ids: list[str] = []

    # load one backend up front: fails fast on unloadable bundles and on
    # configs the model cannot serve; the instance is recycled as the first
    # worker's backend so models never load twice
    probe = backend_factory()
    validate_config_for_backend(config, probe)
    spare: list[Backend] = [probe]
    spare_lock = threading.Lock()
    thread_state = threading.local()

    def backend_for_worker() -> Backend:
        backend = getattr(thread_state, "backend", None)
        if backend is None:
            with spare_lock:
                backend = spare.pop() if spare else None
            if backend is None:
                backend = backend_factory()
            thread_state.backend = backend
            thread_state.text_cache = OrderedDict()
        return backend

    def embed(backend: Backend, text: str):
        tokens = backend.tokenize(text)
        table = collect_embeddings(tokens, plan_masking(len(tokens), config), config, backend)
        return tokens, table

    def text_side(backend: Backend, text: str):
        cache: OrderedDict = thread_state.text_cache
        if text in cache:
            cache.move_to_end(text)
            return cache[text]
        entry = embed(backend, text)
        cache[text] = entry
        if len(cache) > _TEXT_CACHE_SIZE:
            cache.popitem(last=False)
        return entry

    def score_one(pair: PairRecord) -> ScoreRecord:
        backend = backend_for_worker()
        text_tokens, text_table = text_side(backend, pair.text)
        summary_tokens, summary_table = embed(backend, pair.summary)
        result = match_and_count(summary_tokens, summary_table, text_tokens, text_table, config)
        return ScoreRecord(
            id=pair.id,
            measure=measure,
            value=result.num_inconsistencies,
            detail=_result_detail(result, include_matches),
        )

    journal_lock = threading.Lock()
    with open(journal_path, "a" if journal_valid else "w", encoding="utf-8", newline="\n") as journal:
        if not journal_valid:
            journal.write(json.dumps(_meta_header(meta), ensure_ascii=False) + "\n")
            journal.flush()

        def commit(record: ScoreRecord) -> None:
            with journal_lock:
                journal.write(json.dumps(score_to_dict(record), ensure_ascii=False) + "\n")
                journal.flush()
                completed[record.id] = record
                computed_ids.append(record.id)

        if workers == 1:
            for pair in pending:
                try:
                    commit(score_one(pair))
                except Exception as exc:
                    failures.append(PairFailure(id=pair.id, error=str(exc)))
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {pool.submit(score_one, pair): pair for pair in pending}
                for future in as_completed(futures):
                    pair = futures[future]
                    try:
                        commit(future.result())
                    except Exception as exc:
                        failures.append(PairFailure(id=pair.id, error=str(exc)))

    records = [completed[p.id] for p in pairs if p.id in completed]
    write_scores_jsonl(out_path, meta, records)
    journal_path.unlink(missing_ok=True)
    return ScoreRun(records=records, failures=sorted(failures, key=lambda f: f.id), computed_ids=computed_ids)
