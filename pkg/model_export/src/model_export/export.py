"""Checkpoint to bundle conversion."""

from __future__ import annotations

import warnings
from pathlib import Path

import torch

from .manifest import (
    GRAPH_NAME,
    TOKENIZER_NAME,
    ExportError,
    ExportManifest,
    sha256_file,
    write_manifest,
)

_SPECIAL_ATTRS = {"pad": "pad_token_id", "cls": "cls_token_id", "sep": "sep_token_id", "mask": "mask_token_id"}
_SMOKE_TOLERANCE = 1e-4


class _MaskedLMGraph(torch.nn.Module):
    """Trace target: all hidden layers stacked, plus LM logits."""

    def __init__(self, model):
        super().__init__()
        self.model = model

    def forward(self, input_ids, attention_mask):
        out = self.model(
            input_ids=input_ids, attention_mask=attention_mask, output_hidden_states=True
        )
        return torch.stack(out.hidden_states, 0), out.logits


def load_checkpoint(checkpoint_name: str):
    """Eager float32 reference model and its fast tokenizer."""
    from transformers import AutoModelForMaskedLM, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(checkpoint_name, use_fast=True)
        model = AutoModelForMaskedLM.from_pretrained(
            checkpoint_name, dtype=torch.float32, attn_implementation="eager"
        )
    except Exception as exc:
        raise ExportError(f"cannot load checkpoint {checkpoint_name!r}: {exc}") from exc
    return model.eval(), tokenizer


def export(checkpoint_name: str, out_dir) -> ExportManifest:
    """Convert a masked-LM checkpoint into a bundle directory.

    All hidden layers are exported, so one bundle serves any extraction
    layer. The traced graph is smoke-checked against the eager model on a
    differently sized input before the manifest is written.
    """
    model, tokenizer = load_checkpoint(checkpoint_name)
    if getattr(tokenizer, "backend_tokenizer", None) is None:
        raise ExportError(f"{checkpoint_name!r} has no fast tokenizer to serialize")

    special_ids: dict[str, int] = {}
    for name, attr in _SPECIAL_ATTRS.items():
        value = getattr(tokenizer, attr, None)
        if value is None:
            raise ExportError(f"{checkpoint_name!r} does not define a {name} token")
        special_ids[name] = int(value)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tokenizer.backend_tokenizer.save(str(out_dir / TOKENIZER_NAME))

    cls_id, sep_id, mask_id = special_ids["cls"], special_ids["sep"], special_ids["mask"]
    example = torch.tensor([[cls_id, mask_id, mask_id, sep_id]], dtype=torch.long)
    graph = _MaskedLMGraph(model)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            traced = torch.jit.trace(graph, (example, torch.ones_like(example)), check_trace=False)
    except Exception as exc:
        raise ExportError(f"tracing {checkpoint_name!r} failed: {exc}") from exc

    _smoke_check(graph, traced, cls_id, sep_id, mask_id)

    graph_path = out_dir / GRAPH_NAME
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        torch.jit.save(traced, str(graph_path))

    config = model.config
    manifest = ExportManifest(
        model_name=str(checkpoint_name),
        hidden_layers=int(config.num_hidden_layers),
        embedding_dim=int(config.hidden_size),
        max_input_tokens=int(config.max_position_embeddings),
        special_token_ids=special_ids,
        checksum=sha256_file(graph_path),
    )
    write_manifest(out_dir, manifest)
    return manifest


def _smoke_check(graph, traced, cls_id, sep_id, mask_id) -> None:
    """The trace must generalize beyond the example input's length."""
    ids = torch.tensor([[cls_id, mask_id, mask_id, mask_id, mask_id, mask_id, sep_id]])
    mask = torch.ones_like(ids)
    with torch.inference_mode():
        hidden_t, logits_t = traced(ids, mask)
        hidden_e, logits_e = graph(ids, mask)
    diff = max(
        (hidden_t - hidden_e).abs().max().item(),
        (logits_t - logits_e).abs().max().item(),
    )
    if diff > _SMOKE_TOLERANCE:
        raise ExportError(
            f"traced graph diverges from the eager model by {diff:g} "
            "on a length it was not traced with"
        )
