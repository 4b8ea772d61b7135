"""Subtle factual-error generation for clean summaries.

Errors are single-token substitutions: mask a randomly chosen whole-word
token, predict it with a masked language model, and substitute the top
candidate that differs from the original. The result stays fluent while the
content quietly changes. Every prediction uses the clean context, so errors
never compound and their order does not matter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend.base import Backend, TokenSequence
from .exceptions import InsufficientPositionsError, NoCandidateError


@dataclass(frozen=True)
class ErrorGenConfig:
    num_errors_k: int = 3
    seed: int = 0
    candidate_depth: int = 20  # ranked candidates requested per position

    def __post_init__(self):
        if self.num_errors_k < 1:
            raise ValueError("num_errors_k must be at least 1")
        if self.candidate_depth < 2:
            raise ValueError("candidate_depth must be at least 2")


@dataclass(frozen=True)
class ErrorRecord:
    """One substitution: where it happened and what replaced what."""

    position: int
    original_id: int
    original_surface: str
    replacement_id: int
    replacement_surface: str


def eligible_positions(tokens: TokenSequence) -> list[int]:
    """Indices of tokens that constitute a complete word by themselves.

    A position qualifies when it starts a word and the next token (if any)
    also starts a word, i.e. the word is not split across tokens.
    """
    n = len(tokens)
    return [
        i
        for i in range(n)
        if tokens.word_start[i] and (i == n - 1 or tokens.word_start[i + 1])
    ]


def _pick_replacement(tokens: TokenSequence, position: int, depth: int, backend: Backend) -> tuple[int, str]:
    vocab = backend.vocabulary
    original = tokens.ids[position]
    # deepen once before giving up; some positions rank the original and
    # unusable pieces at the top
    for k in (depth, depth * 5):
        for candidate_id, _score in backend.predict_masked(tokens, position, k):
            if candidate_id == original:
                continue
            if vocab.is_special(candidate_id) or vocab.is_continuation(candidate_id):
                continue
            return candidate_id, backend.token_surface(candidate_id)
    raise NoCandidateError(
        f"no replacement for position {position} within {depth * 5} candidates"
    )


def generate_errors(
    summary: str, config: ErrorGenConfig, backend: Backend
) -> tuple[str, list[ErrorRecord]]:
    """Corrupt a clean summary with ``num_errors_k`` single-token errors.

    Positions are drawn uniformly without replacement from the eligible
    whole-word positions, seeded by the config. Returns the detokenized
    corrupted summary and one record per substitution, in position order.
    """
    tokens = backend.tokenize(summary)
    eligible = eligible_positions(tokens)
    if len(eligible) < config.num_errors_k:
        raise InsufficientPositionsError(
            f"summary has {len(eligible)} eligible positions, "
            f"need {config.num_errors_k}"
        )

    rng = np.random.default_rng(config.seed)
    chosen = rng.choice(len(eligible), size=config.num_errors_k, replace=False)
    positions = sorted(eligible[i] for i in chosen)

    new_ids = list(tokens.ids)
    records: list[ErrorRecord] = []
    for position in positions:
        replacement_id, replacement_surface = _pick_replacement(
            tokens, position, config.candidate_depth, backend
        )
        new_ids[position] = replacement_id
        records.append(
            ErrorRecord(
                position=position,
                original_id=tokens.ids[position],
                original_surface=tokens.surfaces[position],
                replacement_id=replacement_id,
                replacement_surface=replacement_surface,
            )
        )
    return backend.detokenize(new_ids), records
