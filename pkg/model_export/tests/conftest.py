from __future__ import annotations

import pytest

torch = pytest.importorskip("torch")
transformers = pytest.importorskip("transformers")

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "a", "an", "of", "in", "on", "to", "and", "after", "over",
    "committee", "approved", "budget", "short", "debate", "rain", "town",
    "marathon", "hours", "engineers", "museum", "harvest", "court", "bakery",
    "##s", "##ed", "##ing", ",", ".",
]


def build_fast_tokenizer():
    from tokenizers import Tokenizer, decoders, normalizers, pre_tokenizers
    from tokenizers.models import WordPiece
    from transformers import PreTrainedTokenizerFast

    tok = Tokenizer(
        WordPiece({t: i for i, t in enumerate(VOCAB)}, unk_token="[UNK]", max_input_chars_per_word=100)
    )
    tok.normalizer = normalizers.BertNormalizer(lowercase=True)
    tok.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    tok.decoder = decoders.WordPiece(prefix="##")
    return PreTrainedTokenizerFast(
        tokenizer_object=tok,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )


def make_checkpoint(path, layers: int, seed: int) -> str:
    """A miniature randomly initialized checkpoint with a fast tokenizer."""
    config = transformers.BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=layers,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=128,
    )
    torch.manual_seed(seed)
    model = transformers.BertForMaskedLM(config)
    model.save_pretrained(path)
    build_fast_tokenizer().save_pretrained(path)
    return str(path)


@pytest.fixture(scope="session")
def base_checkpoint(tmp_path_factory):
    """12 hidden layers: the generation-model architecture shape."""
    return make_checkpoint(tmp_path_factory.mktemp("ckpt-base"), layers=12, seed=1)


@pytest.fixture(scope="session")
def large_checkpoint(tmp_path_factory):
    """24 hidden layers: the scoring-model architecture shape."""
    return make_checkpoint(tmp_path_factory.mktemp("ckpt-large"), layers=24, seed=2)


@pytest.fixture(scope="session")
def base_bundle(tmp_path_factory, base_checkpoint):
    from model_export import export

    out = tmp_path_factory.mktemp("bundle-base")
    manifest = export(base_checkpoint, out)
    return out, manifest


@pytest.fixture(scope="session")
def large_bundle(tmp_path_factory, large_checkpoint):
    from model_export import export

    out = tmp_path_factory.mktemp("bundle-large")
    manifest = export(large_checkpoint, out)
    return out, manifest
