"""Backend over an exported model bundle directory.

A bundle holds three files:

  model.pt       TorchScript graph taking (token ids, attention mask) and
                 returning (hidden states stacked over layers, LM logits)
  tokenizer.json tokenizer definition (HuggingFace tokenizers format)
  manifest.json  model name, hidden_layers, embedding_dim,
                 max_input_tokens, special token ids, graph checksum

torch and tokenizers are imported lazily so the rest of the package works
without them installed.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from ..exceptions import ConfigurationError
from .base import Backend, BackendCapabilities, TokenSequence, Vocabulary

MANIFEST_NAME = "manifest.json"
GRAPH_NAME = "model.pt"
TOKENIZER_NAME = "tokenizer.json"

_CONTINUATION_PREFIX = "##"


def read_manifest(bundle_dir) -> dict:
    path = Path(bundle_dir) / MANIFEST_NAME
    if not path.exists():
        raise ConfigurationError(f"no {MANIFEST_NAME} in {bundle_dir}")
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


class TorchBundleBackend(Backend):
    """Masked LM served from a TorchScript bundle."""

    def __init__(self, bundle_dir):
        try:
            import torch
            from tokenizers import Tokenizer
        except ImportError as exc:
            raise ConfigurationError(
                "loading a model bundle requires torch and tokenizers "
                "(pip install 'estime[model]')"
            ) from exc

        self._torch = torch
        bundle_dir = Path(bundle_dir)
        manifest = read_manifest(bundle_dir)
        try:
            self._capabilities = BackendCapabilities(
                max_input_tokens=int(manifest["max_input_tokens"]),
                hidden_layers=int(manifest["hidden_layers"]),
                embedding_dim=int(manifest["embedding_dim"]),
            )
            special = {k: int(v) for k, v in manifest["special_token_ids"].items()}
            self._cls_id = special["cls"]
            self._sep_id = special["sep"]
            mask_id = special["mask"]
        except KeyError as exc:
            raise ConfigurationError(f"manifest missing field {exc}") from exc

        self._tokenizer = Tokenizer.from_file(str(bundle_dir / TOKENIZER_NAME))
        vocab = self._tokenizer.get_vocab()
        size = max(vocab.values()) + 1
        continuation = frozenset(
            i for t, i in vocab.items() if t.startswith(_CONTINUATION_PREFIX)
        )
        self._vocabulary = Vocabulary(
            size=size,
            mask_token_id=mask_id,
            special_token_ids=frozenset(special.values()),
            continuation_ids=continuation,
        )
        self._graph = torch.jit.load(str(bundle_dir / GRAPH_NAME), map_location="cpu")
        self._graph.eval()

    @property
    def vocabulary(self) -> Vocabulary:
        return self._vocabulary

    @property
    def capabilities(self) -> BackendCapabilities:
        return self._capabilities

    def tokenize(self, text: str) -> TokenSequence:
        encoding = self._tokenizer.encode(text, add_special_tokens=False)
        word_start = [not t.startswith(_CONTINUATION_PREFIX) for t in encoding.tokens]
        return TokenSequence(
            ids=list(encoding.ids), surfaces=list(encoding.tokens), word_start=word_start
        )

    def token_surface(self, token_id: int) -> str:
        surface = self._tokenizer.id_to_token(token_id)
        if surface is None:
            raise ValueError(f"token id {token_id} out of range")
        return surface

    def detokenize(self, ids: Sequence[int]) -> str:
        return self._tokenizer.decode(list(ids), skip_special_tokens=False)

    def _forward(self, content_ids: list[int]) -> tuple[np.ndarray, np.ndarray]:
        """Run the graph on [CLS] + content + [SEP]; returns (hidden, logits).

        hidden has shape (hidden_layers + 1, seq, dim) with the embedding
        output at index 0, logits (seq, vocab); both cover delimiters.
        """
        torch = self._torch
        input_ids = torch.tensor(
            [[self._cls_id, *content_ids, self._sep_id]], dtype=torch.long
        )
        attention = torch.ones_like(input_ids)
        with torch.inference_mode():
            hidden, logits = self._graph(input_ids, attention)
        return (
            hidden[:, 0].to(torch.float32).numpy(),
            logits[0].to(torch.float32).numpy(),
        )

    def embed_masked(
        self,
        tokens: TokenSequence,
        window: tuple[int, int],
        mask_positions: Sequence[int],
        layer: int,
    ) -> np.ndarray:
        self._check_embed_args(len(tokens), window, mask_positions, layer)
        start, end = window
        if not mask_positions:
            return np.empty((0, self._capabilities.embedding_dim), dtype=np.float32)
        content = list(tokens.ids[start:end])
        mask_id = self._vocabulary.mask_token_id
        for pos in mask_positions:
            content[pos - start] = mask_id
        hidden, _ = self._forward(content)
        rows = [pos - start + 1 for pos in mask_positions]  # +1 skips [CLS]
        return np.ascontiguousarray(hidden[layer, rows], dtype=np.float32)

    def predict_masked(self, tokens: TokenSequence, position: int, top_k: int) -> list[tuple[int, float]]:
        n = len(tokens)
        if not 0 <= position < n:
            raise IndexError(f"position {position} out of range for {n} tokens")
        if top_k < 1:
            raise ValueError("top_k must be positive")
        start, end = self._prediction_window(n, position)
        content = list(tokens.ids[start:end])
        content[position - start] = self._vocabulary.mask_token_id
        _, logits = self._forward(content)
        scores = logits[position - start + 1].astype(np.float64)
        scores[list(self._vocabulary.special_token_ids)] = -np.inf
        order = np.argsort(-scores, kind="stable")
        limit = min(top_k, self._vocabulary.size - len(self._vocabulary.special_token_ids))
        return [(int(tid), float(scores[tid])) for tid in order[:limit]]
