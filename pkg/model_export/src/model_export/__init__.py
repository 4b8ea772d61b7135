"""One-shot conversion of masked-LM checkpoints into scoring bundles.

A bundle directory holds a TorchScript graph (token ids and attention mask
in, all hidden layers plus LM-head logits out), the tokenizer definition,
and a JSON manifest describing shapes, special token ids and the graph
checksum. `export` produces bundles; `verify_parity` replays fixtures
through both the bundle and the original checkpoint and reports the largest
divergence.
"""

from .manifest import ExportManifest, read_manifest
from .export import export
from .verify import verify_parity

__all__ = ["ExportManifest", "export", "read_manifest", "verify_parity"]
