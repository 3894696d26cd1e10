import io

import numpy as np
import pytest

from ranksim.embeddings import (
    EmbeddingMatrix,
    PhrasePolicy,
    Vocabulary,
    load_embeddings,
    lookup,
    mean_vector,
    normalize_format,
    resolve_phrase,
    resolve_phrase_row,
    save_embeddings,
)
from ranksim.errors import FormatError, OOVError

from conftest import GOLDEN_TOKENS, GOLDEN_VALUES


def _load_bytes(data: bytes, fmt: str):
    return load_embeddings(io.BytesIO(data), fmt)


class TestLoadFormats:
    def test_word2vec_text_basic(self):
        m = _load_bytes(b"2 3\napple 1 0 0\npear 0 1 0\n", "word2vec-text")
        assert len(m) == 2
        assert m.dims == 3
        assert m.vocab.tokens == ["apple", "pear"]
        assert np.array_equal(m.row(0), [1.0, 0.0, 0.0])

    def test_glove_dims_inferred(self):
        m = _load_bytes(b"apple 1 0\npear 0 1\n", "glove-text")
        assert m.dims == 2
        assert m.vocab.tokens == ["apple", "pear"]

    def test_word2vec_text_dimension_mismatch(self):
        with pytest.raises(FormatError, match="expected 3 values"):
            _load_bytes(b"2 3\napple 1 0\npear 0 1 0\n", "word2vec-text")

    def test_glove_enforces_inferred_dims(self):
        with pytest.raises(FormatError, match="expected 2 values"):
            _load_bytes(b"apple 1 0\npear 0 1 7\n", "glove-text")

    def test_header_count_mismatch(self):
        with pytest.raises(FormatError, match="declares 3 records"):
            _load_bytes(b"3 2\napple 1 0\npear 0 1\n", "word2vec-text")

    def test_bad_header(self):
        with pytest.raises(FormatError):
            _load_bytes(b"apple 1 0\n", "word2vec-text")

    def test_non_numeric_field(self):
        with pytest.raises(FormatError, match="non-numeric"):
            _load_bytes(b"1 2\napple 1 x\n", "word2vec-text")

    def test_non_finite_rejected(self):
        with pytest.raises(FormatError, match="non-finite"):
            _load_bytes(b"1 2\napple 1 nan\n", "word2vec-text")

    def test_duplicate_keeps_first_and_counts(self):
        with pytest.warns(UserWarning, match="1 duplicate"):
            m = _load_bytes(b"3 2\napple 1 0\napple 9 9\npear 0 1\n", "word2vec-text")
        assert m.vocab.tokens == ["apple", "pear"]
        assert np.array_equal(m.row(0), [1.0, 0.0])
        assert m.n_duplicates == 1

    def test_empty_stream(self):
        with pytest.raises(FormatError):
            _load_bytes(b"", "word2vec-text")
        with pytest.raises(FormatError):
            _load_bytes(b"", "glove-text")

    def test_binary_truncated_record(self):
        good = io.BytesIO()
        good.write(b"1 2\n")
        good.write(b"apple " + np.array([1, 2], "<f4").tobytes() + b"\n")
        with pytest.raises(FormatError, match="truncated"):
            _load_bytes(good.getvalue()[:-5], "word2vec-binary")

    def test_binary_missing_records(self):
        buf = b"2 2\napple " + np.array([1, 2], "<f4").tobytes() + b"\n"
        with pytest.raises(FormatError, match="truncated"):
            _load_bytes(buf, "word2vec-binary")

    def test_format_aliases(self):
        assert normalize_format("w2v-bin") == "word2vec-binary"
        assert normalize_format("glove") == "glove-text"
        with pytest.raises(ValueError):
            normalize_format("parquet")


class TestGoldenFiles:
    @pytest.mark.parametrize(
        "filename,fmt",
        [
            ("mini_w2v.txt", "word2vec-text"),
            ("mini_w2v.bin", "word2vec-binary"),
            ("mini_glove.txt", "glove-text"),
        ],
    )
    def test_golden_parse(self, data_dir, filename, fmt):
        m = load_embeddings(str(data_dir / filename), fmt)
        assert m.vocab.tokens == GOLDEN_TOKENS
        np.testing.assert_allclose(m.data, GOLDEN_VALUES, atol=1e-5)

    def test_lookup_matches_literal_rows(self, data_dir):
        m = load_embeddings(str(data_dir / "mini_w2v.txt"), "word2vec-text")
        for i, token in enumerate(GOLDEN_TOKENS):
            assert lookup(m, token) == i
            np.testing.assert_allclose(m.row(i), GOLDEN_VALUES[i], atol=1e-5)


class TestRoundTrip:
    @pytest.mark.parametrize("fmt", ["word2vec-text", "word2vec-binary", "glove-text"])
    def test_save_reload(self, data_dir, fmt, tmp_path):
        m = load_embeddings(str(data_dir / "mini_w2v.txt"), "word2vec-text")
        out = tmp_path / "out.emb"
        save_embeddings(m, str(out), fmt)
        m2 = load_embeddings(str(out), fmt)
        assert m2.vocab.tokens == m.vocab.tokens
        np.testing.assert_allclose(m2.data, m.data, atol=1e-5)

    def test_binary_bit_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        vocab = Vocabulary([f"w{i}" for i in range(20)])
        m = EmbeddingMatrix(vocab, rng.standard_normal((20, 7)).astype(np.float32))
        out = tmp_path / "m.bin"
        save_embeddings(m, str(out), "word2vec-binary")
        m2 = load_embeddings(str(out), "word2vec-binary")
        assert np.array_equal(m2.data, m.data)

    def test_text_roundtrip_random_values(self, tmp_path):
        rng = np.random.default_rng(4)
        vocab = Vocabulary([f"w{i}" for i in range(30)])
        m = EmbeddingMatrix(vocab, rng.standard_normal((30, 10)).astype(np.float32))
        out = tmp_path / "m.txt"
        save_embeddings(m, str(out), "word2vec-text")
        m2 = load_embeddings(str(out), "word2vec-text")
        assert m2.vocab.tokens == m.vocab.tokens
        np.testing.assert_allclose(m2.data, m.data, atol=1e-5)


class TestVocabulary:
    def test_index_roundtrip(self):
        v = Vocabulary(["a", "b", "c"])
        assert [v.row_of(t) for t in v.tokens] == [0, 1, 2]

    def test_rejects_duplicates_and_empty(self):
        with pytest.raises(ValueError):
            Vocabulary(["a", "a"])
        with pytest.raises(ValueError):
            Vocabulary(["a", ""])


class TestLookup:
    def test_present_and_absent(self, animal_matrix):
        assert lookup(animal_matrix, "cat") == 0
        assert lookup(animal_matrix, "zzz") is None

    def test_lowercase_fallback(self, animal_matrix):
        assert lookup(animal_matrix, "Cat") is None
        assert lookup(animal_matrix, "Cat", lowercase=True) == 0


class TestResolvePhrase:
    def test_compound_preferred(self, animal_matrix):
        assert resolve_phrase_row(animal_matrix, "New York") == 5
        np.testing.assert_allclose(
            resolve_phrase(animal_matrix, "New York"), [0.2, 0.2, 0.9], atol=1e-6
        )

    def test_average_fallback(self):
        vocab = Vocabulary(["New", "York"])
        m = EmbeddingMatrix(vocab, np.array([[1, 0], [0, 1]], dtype=np.float32))
        np.testing.assert_allclose(resolve_phrase(m, "New York"), [0.5, 0.5])

    def test_partial_fallback_uses_in_vocab_tokens_only(self, animal_matrix):
        vec = resolve_phrase(animal_matrix, "cat zzz")
        np.testing.assert_allclose(vec, animal_matrix.row(0))

    def test_all_oov(self, animal_matrix):
        with pytest.raises(OOVError):
            resolve_phrase(animal_matrix, "qqq zzz")

    def test_fail_policy(self, animal_matrix):
        policy = PhrasePolicy(fallback="fail")
        with pytest.raises(OOVError):
            resolve_phrase(animal_matrix, "New York2", policy)

    def test_empty_phrase_rejected(self, animal_matrix):
        with pytest.raises(ValueError):
            resolve_phrase(animal_matrix, "   ")

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            PhrasePolicy(join_char="--")
        with pytest.raises(ValueError):
            PhrasePolicy(fallback="zero")


class TestMeanVector:
    def test_examples(self):
        np.testing.assert_allclose(mean_vector([[1, 0], [0, 1]]), [0.5, 0.5])
        np.testing.assert_allclose(mean_vector([[2, 2, 2]]), [2, 2, 2])
        np.testing.assert_allclose(mean_vector([[1, 1], [3, 1], [2, 4]]), [2, 2])

    def test_errors(self):
        with pytest.raises(ValueError):
            mean_vector([])
        with pytest.raises(ValueError):
            mean_vector([[1, 2], [1, 2, 3]])

    def test_permutation_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            k = rng.integers(2, 17)
            vecs = [rng.standard_normal(6) for _ in range(k)]
            base = mean_vector(vecs)
            perm = rng.permutation(k)
            np.testing.assert_allclose(
                mean_vector([vecs[i] for i in perm]), base, atol=1e-12
            )


class TestMatrixInvariants:
    def test_data_is_readonly(self, animal_matrix):
        with pytest.raises(ValueError):
            animal_matrix.data[0, 0] = 7.0

    def test_rows_upcast_to_float64(self, animal_matrix):
        assert animal_matrix.data.dtype == np.float32
        assert animal_matrix.row(0).dtype == np.float64

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            EmbeddingMatrix(Vocabulary(["a"]), np.array([[np.inf]], dtype=np.float32))
