"""Numeric parity between an exported bundle and its source checkpoint."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import torch
from tokenizers import Tokenizer

from .export import _MaskedLMGraph, load_checkpoint
from .fixtures import PARITY_SENTENCES
from .manifest import (
    GRAPH_NAME,
    TOKENIZER_NAME,
    ExportError,
    ShapeMismatchError,
    read_manifest,
    sha256_file,
)


def default_fixture_ids(bundle_dir, sentences: Sequence[str] | None = None) -> list[list[int]]:
    """Tokenize the fixture sentences with the bundle's own tokenizer."""
    tokenizer = Tokenizer.from_file(str(Path(bundle_dir) / TOKENIZER_NAME))
    sentences = PARITY_SENTENCES if sentences is None else sentences
    return [
        tokenizer.encode(sentence, add_special_tokens=False).ids for sentence in sentences
    ]


def verify_parity(
    bundle_dir,
    fixture: Sequence[Sequence[int]] | None = None,
    reference: str | None = None,
) -> float:
    """Max absolute difference over all hidden states and logits.

    ``fixture`` holds content-token id sequences; delimiters are added here.
    The reference checkpoint defaults to the one named in the manifest.
    Shape disagreements (graph vs manifest, graph vs reference) raise
    ShapeMismatchError before any numeric comparison is trusted.
    """
    bundle_dir = Path(bundle_dir)
    manifest = read_manifest(bundle_dir)

    graph_path = bundle_dir / GRAPH_NAME
    actual_checksum = sha256_file(graph_path)
    if actual_checksum != manifest.checksum:
        raise ExportError(
            f"graph checksum {actual_checksum[:12]}... does not match the "
            f"manifest's {manifest.checksum[:12]}..."
        )
    graph = torch.jit.load(str(graph_path), map_location="cpu")
    graph.eval()

    model, _ = load_checkpoint(reference or manifest.model_name)
    eager = _MaskedLMGraph(model)

    if fixture is None:
        fixture = default_fixture_ids(bundle_dir)
    if not fixture:
        return 0.0

    cls_id = manifest.special_token_ids["cls"]
    sep_id = manifest.special_token_ids["sep"]
    max_content = manifest.max_input_tokens - 2

    worst = 0.0
    for sequence in fixture:
        content = list(sequence)[:max_content]
        ids = torch.tensor([[cls_id, *content, sep_id]], dtype=torch.long)
        mask = torch.ones_like(ids)
        with torch.inference_mode():
            hidden_b, logits_b = graph(ids, mask)
            hidden_r, logits_r = eager(ids, mask)
        _check_shapes(manifest, hidden_b, logits_b, hidden_r, logits_r)
        worst = max(
            worst,
            (hidden_b - hidden_r).abs().max().item(),
            (logits_b - logits_r).abs().max().item(),
        )
    return worst


def _check_shapes(manifest, hidden_b, logits_b, hidden_r, logits_r) -> None:
    expected_layers = manifest.hidden_layers + 1  # embedding output included
    if hidden_b.shape[0] != expected_layers or hidden_b.shape[-1] != manifest.embedding_dim:
        raise ShapeMismatchError(
            f"bundle graph produced hidden states {tuple(hidden_b.shape)}, manifest "
            f"promises {manifest.hidden_layers} layers of dim {manifest.embedding_dim}"
        )
    if hidden_b.shape != hidden_r.shape or logits_b.shape != logits_r.shape:
        raise ShapeMismatchError(
            f"bundle outputs {tuple(hidden_b.shape)}/{tuple(logits_b.shape)} differ in "
            f"shape from the reference {tuple(hidden_r.shape)}/{tuple(logits_r.shape)}"
        )
