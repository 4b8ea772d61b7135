"""Inconsistency scoring by mismatched masked-token embeddings.

The score of a (text, summary) pair is the number of checked summary tokens
whose most-similar masked-token embedding in the text belongs to a different
token. Embeddings are collected by masking every content token exactly once
across a sequence of windowed forward passes, then matched by unnormalized
dot product. Higher scores mean more inconsistency, so consumers correlating
against quality ratings negate the value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .backend.base import Backend, TokenSequence
from .exceptions import (
    ConfigurationError,
    EmbeddingPassError,
    EmptyTextError,
    InputSizeError,
)


@dataclass(frozen=True)
class EstimeConfig:
    """Scoring parameters.

    window_w: content tokens per model input window.
    stride_l: spacing between simultaneously masked tokens.
    margin_m: left context kept before the anchor token of each window.
    layer_h: hidden layer to extract (12 or 24 for the reference model).
    filter_to_text_tokens: check only summary tokens whose id occurs in the
        text (on by default; turning it off makes every summary token absent
        from the text an automatic mismatch).
    include_continuation_tokens: also check sub-word continuation tokens.
    """

    window_w: int = 450
    stride_l: int = 8
    margin_m: int = 50
    layer_h: int = 24
    filter_to_text_tokens: bool = True
    include_continuation_tokens: bool = True

    def __post_init__(self):
        if self.window_w < 1:
            raise ConfigurationError("window_w must be positive")
        if not 1 <= self.stride_l <= self.window_w:
            raise ConfigurationError("stride_l must be in [1, window_w]")
        if not 0 <= self.margin_m < self.window_w:
            raise ConfigurationError("margin_m must be in [0, window_w)")
        if self.layer_h < 1:
            raise ConfigurationError("layer_h must be positive")


class Pass(NamedTuple):
    """One masked forward pass: a window plus the positions masked in it."""

    window_start: int
    window_end: int
    mask_positions: list[int]


@dataclass(frozen=True)
class MaskingPlan:
    """Ordered forward passes whose mask positions partition [0, num_tokens)."""

    passes: list[Pass]
    num_tokens: int


@dataclass(frozen=True)
class EmbeddingTable:
    """One embedding row per content token, in token order."""

    vectors: np.ndarray  # (num_tokens, embedding_dim) float32

    def __len__(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class TokenMatch:
    summary_pos: int
    text_pos: int
    summary_token: int
    text_token: int
    similarity: float


@dataclass(frozen=True)
class EstimeResult:
    """Mismatch count plus the per-token match records behind it."""

    num_inconsistencies: int
    num_checked: int
    matches: list[TokenMatch] = field(default_factory=list)


def plan_masking(n: int, config: EstimeConfig) -> MaskingPlan:
    """Plan the windowed masking passes for a sequence of ``n`` tokens.

    Loop: while tokens remain untaken, anchor on the leftmost untaken index
    t, open a window of at most ``window_w`` tokens starting ``margin_m``
    left of t (clamped to the sequence), and mask the untaken positions on
    the arithmetic grid t, t+L, t+2L, ... inside the window. Every token is
    masked in exactly one pass.
    """
    if n < 0:
        raise ValueError("token count must be non-negative")
    taken = bytearray(n)
    passes: list[Pass] = []
    t = 0
    while t < n:
        window_start = max(0, t - config.margin_m)
        window_end = min(n, window_start + config.window_w)
        if t + config.stride_l >= window_end:  # grid fits a single position
            positions = [t]
            taken[t] = 1
        else:
            positions = [p for p in range(t, window_end, config.stride_l) if not taken[p]]
            for p in positions:
                taken[p] = 1
        passes.append(Pass(window_start, window_end, positions))
        while t < n and taken[t]:
            t += 1
    return MaskingPlan(passes=passes, num_tokens=n)


def collect_embeddings(
    tokens: TokenSequence,
    plan: MaskingPlan,
    config: EstimeConfig,
    backend: Backend,
) -> EmbeddingTable:
    """Run every planned pass and fill one embedding slot per token."""
    n = len(tokens)
    if plan.num_tokens != n:
        raise ValueError(f"plan was built for {plan.num_tokens} tokens, got {n}")
    dim = backend.capabilities.embedding_dim
    table = np.zeros((n, dim), dtype=np.float32)
    for index, p in enumerate(plan.passes):
        try:
            vectors = backend.embed_masked(
                tokens, (p.window_start, p.window_end), p.mask_positions, config.layer_h
            )
        except Exception as exc:
            raise EmbeddingPassError(
                f"pass {index} (window [{p.window_start}, {p.window_end}), "
                f"{len(p.mask_positions)} masks) failed: {exc}"
            ) from exc
        table[p.mask_positions] = vectors
    if not np.isfinite(table).all():
        raise EmbeddingPassError("backend produced non-finite embeddings")
    return EmbeddingTable(vectors=table)


def match_and_count(
    summary_tokens: TokenSequence,
    summary_table: EmbeddingTable,
    text_tokens: TokenSequence,
    text_table: EmbeddingTable,
    config: EstimeConfig,
) -> EstimeResult:
    """Match each checked summary embedding to the text and count mismatches.

    The best match is the text position with the highest unnormalized dot
    product; ties break toward the lowest text index. A checked token whose
    id differs from its match's id counts as one inconsistency.
    """
    if len(summary_table) != len(summary_tokens):
        raise ValueError("summary table does not match summary tokens")
    if len(text_table) != len(text_tokens):
        raise ValueError("text table does not match text tokens")

    text_ids = np.asarray(text_tokens.ids, dtype=np.int64)
    text_id_set = set(text_tokens.ids)
    checked = [
        i
        for i in range(len(summary_tokens))
        if (config.include_continuation_tokens or summary_tokens.word_start[i])
        and (not config.filter_to_text_tokens or summary_tokens.ids[i] in text_id_set)
    ]
    if not checked:
        return EstimeResult(num_inconsistencies=0, num_checked=0, matches=[])
    if len(text_tokens) == 0:
        raise EmptyTextError("cannot match summary tokens against an empty text")

    similarities = summary_table.vectors[checked] @ text_table.vectors.T
    best = np.argmax(similarities, axis=1)  # first occurrence wins ties

    matches: list[TokenMatch] = []
    mismatches = 0
    for row, summary_pos in enumerate(checked):
        text_pos = int(best[row])
        s_id = summary_tokens.ids[summary_pos]
        t_id = int(text_ids[text_pos])
        if s_id != t_id:
            mismatches += 1
        matches.append(
            TokenMatch(
                summary_pos=summary_pos,
                text_pos=text_pos,
                summary_token=s_id,
                text_token=t_id,
                similarity=float(similarities[row, text_pos]),
            )
        )
    return EstimeResult(num_inconsistencies=mismatches, num_checked=len(checked), matches=matches)


def validate_config_for_backend(config: EstimeConfig, backend: Backend) -> None:
    """Reject configs the backend cannot serve before any scoring starts."""
    caps = backend.capabilities
    if config.layer_h > caps.hidden_layers:
        raise ConfigurationError(
            f"layer_h={config.layer_h} exceeds the backend's {caps.hidden_layers} hidden layers"
        )
    if config.window_w + backend.num_delimiter_tokens > caps.max_input_tokens:
        raise InputSizeError(
            f"window_w={config.window_w} plus delimiters exceeds the model "
            f"limit of {caps.max_input_tokens}"
        )


def estime(text: str, summary: str, config: EstimeConfig, backend: Backend) -> EstimeResult:
    """Score one (text, summary) pair end to end."""
    validate_config_for_backend(config, backend)
    text_tokens = backend.tokenize(text)
    summary_tokens = backend.tokenize(summary)
    text_table = collect_embeddings(
        text_tokens, plan_masking(len(text_tokens), config), config, backend
    )
    summary_table = collect_embeddings(
        summary_tokens, plan_masking(len(summary_tokens), config), config, backend
    )
    return match_and_count(summary_tokens, summary_table, text_tokens, text_table, config)
