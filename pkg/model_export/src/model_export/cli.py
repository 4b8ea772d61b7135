"""Command line interface for bundle export and verification."""

from __future__ import annotations

import sys

import click

from .export import export
from .manifest import ExportError
from .verify import verify_parity

PARITY_TOLERANCE = 1e-4


@click.group()
def main() -> None:
    """Convert masked-LM checkpoints into scoring bundles and verify them."""


@main.command("export")
@click.option("--model", "model_name", required=True, help="Checkpoint name or local path.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def export_cmd(model_name, out_dir):
    """Write graph, tokenizer and manifest for one checkpoint."""
    try:
        manifest = export(model_name, out_dir)
    except ExportError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(
        f"exported {manifest.model_name}: {manifest.hidden_layers} layers, "
        f"dim {manifest.embedding_dim}, checksum {manifest.checksum[:12]}..."
    )


@main.command("verify")
@click.option("--bundle", "bundle_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--reference", default=None, help="Override the manifest's reference checkpoint.")
@click.option("--tolerance", default=PARITY_TOLERANCE, show_default=True, type=float)
def verify_cmd(bundle_dir, reference, tolerance):
    """Replay the fixture sentences through bundle and reference."""
    try:
        diff = verify_parity(bundle_dir, reference=reference)
    except ExportError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(f"max abs difference: {diff:.3e}")
    if diff >= tolerance:
        click.echo(f"FAIL: exceeds tolerance {tolerance:g}", err=True)
        sys.exit(1)
    click.echo("parity OK")


if __name__ == "__main__":
    main()
