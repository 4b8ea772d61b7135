"""Masked-language-model backend interface and shared domain types.

A backend owns the tokenizer and the model. Content-token indices are the
only currency at this interface: the backend inserts sequence delimiters
([CLS]/[SEP]) itself and translates indices, so callers never see them.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..exceptions import ConfigurationError, InputSizeError


@dataclass(frozen=True)
class Vocabulary:
    """Token-id space of a backend.

    ``special_token_ids`` holds sequence delimiters, padding and the mask
    token; the unknown token is ordinary content. ``continuation_ids`` are
    ids that only ever continue a word, never start one.
    """

    size: int
    mask_token_id: int
    special_token_ids: frozenset[int]
    continuation_ids: frozenset[int]

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("vocabulary size must be positive")
        if self.mask_token_id not in self.special_token_ids:
            raise ValueError("mask token must be a special token")
        if not all(0 <= t < self.size for t in self.special_token_ids):
            raise ValueError("special token ids out of range")
        if self.special_token_ids & self.continuation_ids:
            raise ValueError("continuation tokens cannot be special tokens")

    def is_continuation(self, token_id: int) -> bool:
        return token_id in self.continuation_ids

    def is_special(self, token_id: int) -> bool:
        return token_id in self.special_token_ids


@dataclass(frozen=True)
class TokenSequence:
    """Content tokens of one text: ids, surface strings and word-start flags.

    Sequence delimiters never appear here. ``word_start[i]`` is true iff
    token i begins a word, i.e. ids[i] is not a continuation token.
    """

    ids: list[int]
    surfaces: list[str]
    word_start: list[bool]

    def __post_init__(self):
        if not (len(self.ids) == len(self.surfaces) == len(self.word_start)):
            raise ValueError("ids, surfaces and word_start must have equal length")

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class BackendCapabilities:
    max_input_tokens: int  # hard model input limit, counting delimiters
    hidden_layers: int
    embedding_dim: int

    def __post_init__(self):
        if self.max_input_tokens < 3:
            raise ValueError("max_input_tokens must be at least 3")
        if self.hidden_layers < 1 or self.embedding_dim < 1:
            raise ValueError("hidden_layers and embedding_dim must be positive")


class Backend(ABC):
    """Uniform interface to a masked language model.

    Implementations must be deterministic: identical arguments produce
    identical outputs. A backend instance is not required to be usable from
    several threads at once; callers needing parallelism create one instance
    per worker. Tokenization is pure and safely shareable.
    """

    # [CLS] ... [SEP], the standard encoder convention
    num_delimiter_tokens = 2

    @property
    @abstractmethod
    def vocabulary(self) -> Vocabulary: ...

    @property
    @abstractmethod
    def capabilities(self) -> BackendCapabilities: ...

    @abstractmethod
    def tokenize(self, text: str) -> TokenSequence:
        """Split text into content tokens. Empty input gives an empty sequence."""

    @abstractmethod
    def embed_masked(
        self,
        tokens: TokenSequence,
        window: tuple[int, int],
        mask_positions: Sequence[int],
        layer: int,
    ) -> np.ndarray:
        """Hidden states at a chosen layer for masked positions.

        The model input is the window's tokens with delimiters added at the
        ends and the mask token substituted at every mask position. Returns
        one float32 row per mask position, in the same order.
        """

    @abstractmethod
    def predict_masked(self, tokens: TokenSequence, position: int, top_k: int) -> list[tuple[int, float]]:
        """Candidate token ids for one masked position, best first.

        Scores are monotonically non-increasing down the list. Candidates
        never include special tokens, so the list has exactly
        ``min(top_k, vocabulary.size - len(special_token_ids))`` entries.
        Inputs longer than the model limit are truncated to a window
        centered on the masked position.
        """

    @abstractmethod
    def token_surface(self, token_id: int) -> str:
        """Canonical surface string of a token id."""

    @abstractmethod
    def detokenize(self, ids: Sequence[int]) -> str:
        """Render content-token ids back into a string."""

    # shared argument validation for embed_masked implementations
    def _check_embed_args(
        self,
        n: int,
        window: tuple[int, int],
        mask_positions: Sequence[int],
        layer: int,
    ) -> None:
        start, end = window
        if not (0 <= start <= end <= n):
            raise ValueError(f"window [{start}, {end}) out of range for {n} tokens")
        width = end - start
        if width + self.num_delimiter_tokens > self.capabilities.max_input_tokens:
            raise InputSizeError(
                f"window of {width} tokens plus {self.num_delimiter_tokens} delimiters "
                f"exceeds the model limit of {self.capabilities.max_input_tokens}"
            )
        if not 1 <= layer <= self.capabilities.hidden_layers:
            raise ConfigurationError(
                f"layer {layer} not in [1, {self.capabilities.hidden_layers}]"
            )
        prev = None
        for p in mask_positions:
            if not start <= p < end:
                raise ValueError(f"mask position {p} outside window [{start}, {end})")
            if prev is not None and p <= prev:
                raise ValueError("mask positions must be strictly increasing")
            prev = p

    def _prediction_window(self, n: int, position: int) -> tuple[int, int]:
        """Largest content window centered on ``position`` that fits the model."""
        max_content = self.capabilities.max_input_tokens - self.num_delimiter_tokens
        if n <= max_content:
            return 0, n
        start = position - max_content // 2
        start = max(0, min(start, n - max_content))
        return start, start + max_content
