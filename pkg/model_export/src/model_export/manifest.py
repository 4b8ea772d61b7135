"""Bundle manifest schema shared by export and verification."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

MANIFEST_NAME = "manifest.json"
GRAPH_NAME = "model.pt"
TOKENIZER_NAME = "tokenizer.json"


class ExportError(Exception):
    """Checkpoint retrieval or conversion failed."""


class ShapeMismatchError(ExportError):
    """The exported graph does not match its manifest or its source model."""


@dataclass(frozen=True)
class ExportManifest:
    model_name: str
    hidden_layers: int
    embedding_dim: int
    max_input_tokens: int
    special_token_ids: dict[str, int]
    checksum: str
    format: str = "torchscript"

    def to_dict(self) -> dict:
        return asdict(self)


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(bundle_dir, manifest: ExportManifest) -> None:
    path = Path(bundle_dir) / MANIFEST_NAME
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def read_manifest(bundle_dir) -> ExportManifest:
    path = Path(bundle_dir) / MANIFEST_NAME
    if not path.exists():
        raise ExportError(f"no {MANIFEST_NAME} in {bundle_dir}")
    with open(path, encoding="utf-8") as handle:
        raw = json.load(handle)
    try:
        return ExportManifest(
            model_name=raw["model_name"],
            hidden_layers=int(raw["hidden_layers"]),
            embedding_dim=int(raw["embedding_dim"]),
            max_input_tokens=int(raw["max_input_tokens"]),
            special_token_ids={k: int(v) for k, v in raw["special_token_ids"].items()},
            checksum=raw["checksum"],
            format=raw.get("format", "torchscript"),
        )
    except KeyError as exc:
        raise ExportError(f"manifest missing field {exc}") from exc
