"""Bundle backend checks against an in-test miniature model.

These tests build a tiny randomly initialized encoder, trace it, and write a
bundle by hand following the documented schema. They need torch and
transformers and are skipped where those are unavailable.
"""

import hashlib
import json
import warnings

import numpy as np
import pytest

torch = pytest.importorskip("torch")
transformers = pytest.importorskip("transformers")
tokenizers = pytest.importorskip("tokenizers")

from estime.backend import load_backend
from estime.exceptions import ConfigurationError, InputSizeError
from estime.scorer import EstimeConfig, estime

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "hello", "world", "un", "##ha", "##pp", "##in", "##es", "##s",
    "the", "cat", "sat", "on", "mat", "a", "dog", "ran", "over",
    "lazy", "fence", ",", ".",
]
HIDDEN = 32
LAYERS = 3
MAX_INPUT = 24


def build_tokenizer():
    from tokenizers import Tokenizer, decoders, normalizers, pre_tokenizers
    from tokenizers.models import WordPiece

    tok = Tokenizer(
        WordPiece({t: i for i, t in enumerate(VOCAB)}, unk_token="[UNK]", max_input_chars_per_word=100)
    )
    tok.normalizer = normalizers.BertNormalizer(lowercase=True)
    tok.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    tok.decoder = decoders.WordPiece(prefix="##")
    return tok


class Graph(torch.nn.Module):
    def __init__(self, model):
        super().__init__()
        self.model = model

    def forward(self, input_ids, attention_mask):
        out = self.model(
            input_ids=input_ids, attention_mask=attention_mask, output_hidden_states=True
        )
        return torch.stack(out.hidden_states, 0), out.logits


@pytest.fixture(scope="module")
def reference_model():
    config = transformers.BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=HIDDEN,
        num_hidden_layers=LAYERS,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=MAX_INPUT,
        attn_implementation="eager",
    )
    torch.manual_seed(7)
    return transformers.BertForMaskedLM(config).eval()


@pytest.fixture(scope="module")
def bundle_dir(tmp_path_factory, reference_model):
    out = tmp_path_factory.mktemp("bundle")
    build_tokenizer().save(str(out / "tokenizer.json"))

    example = (
        torch.tensor([[2, 5, 6, 3]], dtype=torch.long),
        torch.ones(1, 4, dtype=torch.long),
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        traced = torch.jit.trace(Graph(reference_model), example, check_trace=False)
    torch.jit.save(traced, str(out / "model.pt"))

    manifest = {
        "format": "torchscript",
        "model_name": "tiny-test-encoder",
        "hidden_layers": LAYERS,
        "embedding_dim": HIDDEN,
        "max_input_tokens": MAX_INPUT,
        "special_token_ids": {"pad": 0, "cls": 2, "sep": 3, "mask": 4},
        "checksum": hashlib.sha256((out / "model.pt").read_bytes()).hexdigest(),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return out


@pytest.fixture(scope="module")
def backend(bundle_dir):
    return load_backend(bundle_dir)


class TestTokenize:
    def test_two_whole_words(self, backend):
        ts = backend.tokenize("hello world")
        assert len(ts) == 2
        assert ts.word_start == [True, True]
        assert ts.surfaces == ["hello", "world"]

    def test_split_word(self, backend):
        ts = backend.tokenize("unhappiness")
        assert ts.surfaces == ["un", "##ha", "##pp", "##in", "##es", "##s"]
        assert ts.word_start == [True, False, False, False, False, False]

    def test_empty(self, backend):
        assert len(backend.tokenize("")) == 0

    def test_no_delimiters_in_output(self, backend):
        ts = backend.tokenize("hello world.")
        assert 2 not in ts.ids and 3 not in ts.ids

    def test_detokenize(self, backend):
        ts = backend.tokenize("the cat sat, hello.")
        assert backend.detokenize(ts.ids) == "the cat sat, hello."


class TestEmbedMasked:
    def test_parity_with_eager_reference(self, backend, reference_model):
        # fixed 10-token sentence, one position masked, top layer
        sentence = "the cat sat on the mat over a lazy dog"
        tokens = backend.tokenize(sentence)
        assert len(tokens) == 10
        got = backend.embed_masked(tokens, (0, 10), [3], LAYERS)

        ids = [2, *tokens.ids, 3]
        ids[4] = 4  # content position 3, shifted by [CLS]
        with torch.inference_mode():
            out = reference_model(
                input_ids=torch.tensor([ids]),
                attention_mask=torch.ones(1, len(ids), dtype=torch.long),
                output_hidden_states=True,
            )
        expected = out.hidden_states[LAYERS][0, 4].numpy()
        assert np.abs(got[0] - expected).max() < 1e-4

    def test_window_offsets_are_translated(self, backend, reference_model):
        tokens = backend.tokenize("the cat sat on the mat over a lazy dog")
        got = backend.embed_masked(tokens, (2, 8), [3, 5], 2)

        ids = [2, *tokens.ids[2:8], 3]
        ids[2] = 4  # content 3 -> window row 1 -> input row 2
        ids[4] = 4
        with torch.inference_mode():
            out = reference_model(
                input_ids=torch.tensor([ids]),
                attention_mask=torch.ones(1, len(ids), dtype=torch.long),
                output_hidden_states=True,
            )
        expected = out.hidden_states[2][0, [2, 4]].numpy()
        assert np.abs(got - expected).max() < 1e-4

    def test_empty_mask_positions(self, backend):
        tokens = backend.tokenize("hello world")
        assert backend.embed_masked(tokens, (0, 2), [], 1).shape == (0, HIDDEN)

    def test_input_size_guard(self, backend):
        tokens = backend.tokenize(" ".join(["cat"] * 30))
        with pytest.raises(InputSizeError):
            backend.embed_masked(tokens, (0, 30), [0], 1)

    def test_layer_guard(self, backend):
        tokens = backend.tokenize("hello world")
        with pytest.raises(ConfigurationError):
            backend.embed_masked(tokens, (0, 2), [0], LAYERS + 1)

    def test_deterministic(self, backend):
        tokens = backend.tokenize("the cat sat on the mat")
        a = backend.embed_masked(tokens, (0, 6), [1, 4], 1)
        b = backend.embed_masked(tokens, (0, 6), [1, 4], 1)
        np.testing.assert_array_equal(a, b)


class TestPredictMasked:
    def test_contract(self, backend):
        vocab = backend.vocabulary
        tokens = backend.tokenize("the cat sat on the mat")
        ranked = backend.predict_masked(tokens, 2, 10)
        assert len(ranked) == 10
        scores = [s for _, s in ranked]
        assert scores == sorted(scores, reverse=True)
        assert not any(vocab.is_special(t) for t, _ in ranked)

    def test_cardinality_cap(self, backend):
        vocab = backend.vocabulary
        tokens = backend.tokenize("hello world")
        ranked = backend.predict_masked(tokens, 0, 10_000)
        assert len(ranked) == vocab.size - len(vocab.special_token_ids)

    def test_long_input_is_centered(self, backend):
        words = ["cat"] * 40
        tokens = backend.tokenize(" ".join(words))
        assert len(tokens) > MAX_INPUT
        ranked = backend.predict_masked(tokens, 35, 3)
        assert len(ranked) == 3

    def test_matches_eager_argmax(self, backend, reference_model):
        tokens = backend.tokenize("the cat sat on the mat")
        (top, _), = backend.predict_masked(tokens, 1, 1)
        ids = [2, *tokens.ids, 3]
        ids[2] = 4
        with torch.inference_mode():
            logits = reference_model(
                input_ids=torch.tensor([ids]),
                attention_mask=torch.ones(1, len(ids), dtype=torch.long),
            ).logits[0, 2].numpy().copy()
        logits[[0, 2, 3, 4]] = -np.inf
        assert top == int(logits.argmax())


class TestEndToEnd:
    def test_estime_runs_on_bundle(self, backend):
        config = EstimeConfig(window_w=16, stride_l=4, margin_m=2, layer_h=LAYERS)
        result = estime(
            "the cat sat on the mat over a lazy dog, hello world.",
            "the cat sat on the mat",
            config,
            backend,
        )
        assert 0 <= result.num_inconsistencies <= result.num_checked

    def test_vocabulary_flags(self, backend):
        vocab = backend.vocabulary
        assert vocab.mask_token_id == 4
        assert vocab.is_continuation(VOCAB.index("##ha"))
        assert not vocab.is_continuation(VOCAB.index("hello"))
