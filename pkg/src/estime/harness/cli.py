"""Command line interface.

Exit codes: 0 on success, 1 when per-item failures occurred (scoring
failures, skipped summaries), 2 on configuration or IO errors.
"""

from __future__ import annotations

import json
import sys

import click

from ..backend import load_backend
from ..errorgen import ErrorGenConfig
from ..exceptions import EstimeError
from ..scorer import EstimeConfig
from .benchmark import build_error_benchmark
from .correlate import LEVELS, correlate, report_to_dict
from .records import QUALITIES, read_pairs_jsonl, write_pairs_jsonl
from .scoring import run_score
from .summeval import ingest_summeval

EXIT_OK = 0
EXIT_ITEM_FAILURES = 1
EXIT_CONFIG = 2


@click.group()
def main() -> None:
    """Summary-to-text inconsistency scoring and evaluation tools."""


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_CONFIG)


@main.command()
@click.option("--model-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--layer", type=int, default=24, show_default=True, metavar="{12|24}")
@click.option("--window", type=int, default=450, show_default=True)
@click.option("--stride", type=int, default=8, show_default=True)
@click.option("--margin", type=int, default=50, show_default=True)
@click.option("--no-filter", is_flag=True, help="Check every summary token, even ids absent from the text.")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--with-matches", is_flag=True, help="Record per-token matches in score details.")
def score(model_dir, layer, window, stride, margin, no_filter, in_path, out_path, workers, with_matches):
    """Score pairs and write scores-jsonl (resumes from its progress journal)."""
    try:
        config = EstimeConfig(
            window_w=window,
            stride_l=stride,
            margin_m=margin,
            layer_h=layer,
            filter_to_text_tokens=not no_filter,
        )
        pairs = read_pairs_jsonl(in_path)
        run = run_score(
            pairs,
            config,
            lambda: load_backend(model_dir),
            out_path,
            workers=workers,
            include_matches=with_matches,
        )
    except EstimeError as exc:
        _fail(str(exc))
    click.echo(f"scored {len(run.records)}/{len(pairs)} pairs ({len(run.computed_ids)} new)")
    if run.failures:
        for failure in run.failures:
            click.echo(f"failed {failure.id}: {failure.error}", err=True)
        sys.exit(EXIT_ITEM_FAILURES)


@main.command("gen-errors")
@click.option("--model-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--k", type=int, default=3, show_default=True, help="Errors per summary.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--depth", type=int, default=20, show_default=True, help="Candidates requested per masked position.")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def gen_errors(model_dir, k, seed, depth, in_path, out_path):
    """Build the clean + corrupted benchmark from clean pairs."""
    try:
        config = ErrorGenConfig(num_errors_k=k, seed=seed, candidate_depth=depth)
        pairs = read_pairs_jsonl(in_path)
        backend = load_backend(model_dir)
        result = build_error_benchmark(pairs, config, backend)
        write_pairs_jsonl(out_path, result.records)
        _write_error_sidecar(out_path, result)
    except EstimeError as exc:
        _fail(str(exc))
    click.echo(
        f"wrote {len(result.records)} pairs "
        f"({len(result.records) // 2} clean + corrupted), skipped {len(result.skipped)}"
    )
    if result.skipped:
        for item in result.skipped:
            click.echo(f"skipped {item.id}: {item.reason}", err=True)
        sys.exit(EXIT_ITEM_FAILURES)


def _write_error_sidecar(out_path, result) -> None:
    sidecar = str(out_path) + ".errors.jsonl"
    with open(sidecar, "w", encoding="utf-8", newline="\n") as handle:
        for corrupted_id in sorted(result.error_records):
            row = {
                "id": corrupted_id,
                "errors": [
                    {
                        "position": r.position,
                        "original_id": r.original_id,
                        "original_surface": r.original_surface,
                        "replacement_id": r.replacement_id,
                        "replacement_surface": r.replacement_surface,
                    }
                    for r in result.error_records[corrupted_id]
                ],
            }
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")


@main.command("correlate")
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--scores", "score_paths", required=True, multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--quality", type=click.Choice(QUALITIES + ("gold_label",)), default="consistency", show_default=True)
@click.option("--level", type=click.Choice(LEVELS), default="summary", show_default=True)
@click.option("--perms", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def correlate_cmd(pairs_path, score_paths, quality, level, perms, seed, out_path):
    """Correlate score files against expert annotations (or gold labels)."""
    try:
        pairs = read_pairs_jsonl(pairs_path)
        if quality == "gold_label":
            pairs = [_gold_as_quality(p) for p in pairs]
        reports = correlate(
            pairs, list(score_paths), quality, level, permutations=perms, seed=seed
        )
    except (EstimeError, ValueError) as exc:
        _fail(str(exc))
    payload = {"quality": quality, "level": level, "reports": [report_to_dict(r) for r in reports]}
    with open(out_path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    for report in reports:
        click.echo(
            f"{report.measure}: rho={report.report.rho:.3f} (p={report.report.rho_p:.3g}) "
            f"tau_c={report.report.tau_c:.3f} (p={report.report.tau_p:.3g}) n={report.report.n}"
        )


def _gold_as_quality(pair):
    from dataclasses import replace

    if pair.gold_label is None:
        raise ValueError(f"pair {pair.id!r} has no gold_label")
    scores = dict(pair.quality_scores or {})
    scores["gold_label"] = [pair.gold_label]
    return replace(pair, quality_scores=scores)


@main.command("ingest-summeval")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def ingest_summeval_cmd(in_path, out_path):
    """Normalize a SummEval release into pairs-jsonl."""
    try:
        records = ingest_summeval(in_path)
        write_pairs_jsonl(out_path, records)
    except (EstimeError, FileNotFoundError) as exc:
        _fail(str(exc))
    systems = {r.system for r in records}
    click.echo(f"wrote {len(records)} pairs from {len(systems)} systems")


if __name__ == "__main__":
    main()
