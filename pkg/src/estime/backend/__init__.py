"""Masked-language-model backends: the real bundle loader and the mock."""

from __future__ import annotations

import json
from pathlib import Path

from ..exceptions import ConfigurationError
from .base import Backend, BackendCapabilities, TokenSequence, Vocabulary
from .mock import MockBackend

__all__ = [
    "Backend",
    "BackendCapabilities",
    "MockBackend",
    "TokenSequence",
    "Vocabulary",
    "create_mock_bundle",
    "load_backend",
]


def load_backend(model_dir) -> Backend:
    """Instantiate the backend described by a bundle directory's manifest."""
    from .bundle import TorchBundleBackend, read_manifest

    manifest = read_manifest(model_dir)
    bundle_format = manifest.get("format", "torchscript")
    if bundle_format == "mock":
        return MockBackend()
    if bundle_format == "torchscript":
        return TorchBundleBackend(model_dir)
    raise ConfigurationError(f"unknown bundle format {bundle_format!r}")


def create_mock_bundle(model_dir) -> None:
    """Write a manifest that resolves to the mock backend (tests, dry runs)."""
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    backend = MockBackend()
    caps = backend.capabilities
    manifest = {
        "format": "mock",
        "model_name": "mock",
        "hidden_layers": caps.hidden_layers,
        "embedding_dim": caps.embedding_dim,
        "max_input_tokens": caps.max_input_tokens,
        "special_token_ids": {"mask": backend.vocabulary.mask_token_id},
    }
    with open(model_dir / "manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
        handle.write("\n")
