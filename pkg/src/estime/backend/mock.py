"""Deterministic model-free backend for tests and dry runs.

The mock is context-free by construction: the embedding returned for a
masked position depends only on the token id at that position in the
unmasked sequence. Each token id gets a fixed pseudo-random unit vector
(dimension 32, seeded by the id), so scoring a text against itself yields
zero mismatches while distinct ids almost surely mismatch.

The vocabulary is a small closed set: lowercase alphanumeric pieces of
length 1 and 2 (word-start and ``##`` continuation variants) plus single
punctuation characters. Words tokenize by greedy 2-character chunking, so
id -> surface -> id round-trips exactly.
"""

from __future__ import annotations

import string
from functools import lru_cache
from typing import Sequence

import numpy as np

from .base import Backend, BackendCapabilities, TokenSequence, Vocabulary

_PAD, _UNK, _CLS, _SEP, _MASK = range(5)
_ALPHABET = string.ascii_lowercase + string.digits
_PUNCT = sorted(string.punctuation)

_EMBEDDING_DIM = 32


def _build_tables() -> tuple[dict[str, int], dict[str, int], list[str]]:
    """Piece tables: word-start piece -> id, continuation piece -> id, id -> surface."""
    surfaces = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    start_ids: dict[str, int] = {}
    cont_ids: dict[str, int] = {}

    alnum_pieces = list(_ALPHABET) + [a + b for a in _ALPHABET for b in _ALPHABET]
    for piece in alnum_pieces + _PUNCT:
        start_ids[piece] = len(surfaces)
        surfaces.append(piece)
    for piece in alnum_pieces:
        cont_ids[piece] = len(surfaces)
        surfaces.append("##" + piece)
    return start_ids, cont_ids, surfaces


_START_IDS, _CONT_IDS, _SURFACES = _build_tables()
_VOCAB = Vocabulary(
    size=len(_SURFACES),
    mask_token_id=_MASK,
    special_token_ids=frozenset({_PAD, _CLS, _SEP, _MASK}),
    continuation_ids=frozenset(_CONT_IDS.values()),
)


@lru_cache(maxsize=None)
def _unit_vector(token_id: int) -> np.ndarray:
    rng = np.random.default_rng(token_id)
    v = rng.standard_normal(_EMBEDDING_DIM)
    v /= np.linalg.norm(v)
    return v.astype(np.float32)


class MockBackend(Backend):
    """Context-free mock of a masked language model."""

    def __init__(self):
        self._capabilities = BackendCapabilities(
            max_input_tokens=512, hidden_layers=24, embedding_dim=_EMBEDDING_DIM
        )

    @property
    def vocabulary(self) -> Vocabulary:
        return _VOCAB

    @property
    def capabilities(self) -> BackendCapabilities:
        return self._capabilities

    def tokenize(self, text: str) -> TokenSequence:
        ids: list[int] = []
        surfaces: list[str] = []
        word_start: list[bool] = []
        for word in self._split_words(text):
            for k, piece in enumerate(self._chunk(word)):
                if k == 0:
                    tid = _START_IDS.get(piece, _UNK)
                    surf = piece if tid != _UNK else "[UNK]"
                else:
                    tid = _CONT_IDS[piece]
                    surf = "##" + piece
                ids.append(tid)
                surfaces.append(surf)
                word_start.append(k == 0)
        return TokenSequence(ids=ids, surfaces=surfaces, word_start=word_start)

    @staticmethod
    def _split_words(text: str) -> list[str]:
        """Lowercase, split on whitespace, and break out punctuation."""
        words: list[str] = []
        current: list[str] = []
        for ch in text.lower():
            if ch.isspace():
                if current:
                    words.append("".join(current))
                    current = []
            elif ch in string.punctuation:
                if current:
                    words.append("".join(current))
                    current = []
                words.append(ch)
            else:
                current.append(ch)
        if current:
            words.append("".join(current))
        return words

    @staticmethod
    def _chunk(word: str) -> list[str]:
        """Greedy 2-character pieces; any foreign character sinks the word to [UNK]."""
        if word in _START_IDS:
            return [word]
        if any(ch not in _ALPHABET for ch in word):
            return [word]  # unmapped surface, resolves to [UNK]
        return [word[i : i + 2] for i in range(0, len(word), 2)]

    def embed_masked(
        self,
        tokens: TokenSequence,
        window: tuple[int, int],
        mask_positions: Sequence[int],
        layer: int,
    ) -> np.ndarray:
        self._check_embed_args(len(tokens), window, mask_positions, layer)
        out = np.empty((len(mask_positions), _EMBEDDING_DIM), dtype=np.float32)
        for row, pos in enumerate(mask_positions):
            out[row] = _unit_vector(tokens.ids[pos])
        return out

    def predict_masked(self, tokens: TokenSequence, position: int, top_k: int) -> list[tuple[int, float]]:
        if not 0 <= position < len(tokens):
            raise IndexError(f"position {position} out of range for {len(tokens)} tokens")
        if top_k < 1:
            raise ValueError("top_k must be positive")
        vocab = self.vocabulary
        original = tokens.ids[position]
        starts: list[int] = []
        continuations: list[int] = []
        for delta in range(1, vocab.size + 1):
            tid = (original + delta) % vocab.size
            if vocab.is_special(tid):
                continue
            if vocab.is_continuation(tid):
                continuations.append(tid)
            else:
                starts.append(tid)
                if len(starts) >= top_k:
                    break
        ranked = (starts + continuations)[:top_k]
        return [(tid, 1.0 / (1 + rank)) for rank, tid in enumerate(ranked)]

    def token_surface(self, token_id: int) -> str:
        if not 0 <= token_id < _VOCAB.size:
            raise ValueError(f"token id {token_id} out of range")
        return _SURFACES[token_id]

    def detokenize(self, ids: Sequence[int]) -> str:
        words: list[str] = []
        for tid in ids:
            surface = self.token_surface(tid)
            if surface.startswith("##") and words:
                words[-1] += surface[2:]
            else:
                words.append(surface)
        return " ".join(words)
