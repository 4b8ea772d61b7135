from __future__ import annotations

import random
import string

import pytest

from estime.backend import MockBackend
from estime.backend.base import TokenSequence


@pytest.fixture(scope="session")
def mock_backend() -> MockBackend:
    return MockBackend()


def make_tokens(backend, ids) -> TokenSequence:
    """Build a TokenSequence directly from ids, consistent with the vocab."""
    vocab = backend.vocabulary
    return TokenSequence(
        ids=list(ids),
        surfaces=[backend.token_surface(t) for t in ids],
        word_start=[not vocab.is_continuation(t) for t in ids],
    )


def random_words(rng: random.Random, count: int, max_len: int = 6) -> str:
    """Whitespace-joined lowercase words drawn from the mock alphabet."""
    alphabet = string.ascii_lowercase + string.digits
    return " ".join(
        "".join(rng.choice(alphabet) for _ in range(rng.randint(1, max_len)))
        for _ in range(count)
    )
