"""Hashed context embeddings and the external embedding file format."""

import numpy as np
import pytest

from spellcl.corpus import parse_corpus
from spellcl.embed import (
    HashedEmbedder,
    embed_corpus,
    embeddings_to_text,
    hashed_embed,
    load_embeddings,
    parse_embeddings,
)
from spellcl.errors import DimMismatch, MalformedLine, MissingEmbedding, MissingPosition

BACKENDS = ["numba", "numpy"]


def oracle_vector(sequence: str, j: int, window: int, dim: int) -> np.ndarray:
    """Independent re-implementation of the hashing rule for one position."""

    def fnv1a(data: bytes) -> int:
        h = 0xCBF29CE484222325
        for byte in data:
            h ^= byte
            h = (h * 0x100000001B3) % (1 << 64)
        return h

    vec = np.zeros(dim)
    for o in range(-window, window + 1):
        p = j + o
        if 0 <= p < len(sequence):
            h = fnv1a(sequence[p].encode("utf-8") + bytes([o & 0xFF]))
            vec[h % dim] += 1.0 if h < (1 << 63) else -1.0
    return vec


# ===========================================================================
# hashed_embed
# ===========================================================================

class TestHashedEmbed:

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_matches_independent_oracle(self, backend):
        vectors = hashed_embed("AB", window=1, dim=8, backend=backend)
        np.testing.assert_array_equal(vectors[0], oracle_vector("AB", 0, 1, 8))
        np.testing.assert_array_equal(vectors[1], oracle_vector("AB", 1, 1, 8))

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_oracle_multibyte_chars(self, backend):
        seq = "他戴着帽子"
        vectors = hashed_embed(seq, window=2, dim=16, backend=backend)
        for j in range(len(seq)):
            np.testing.assert_array_equal(vectors[j], oracle_vector(seq, j, 2, 16))

    def test_backends_bit_identical(self):
        seq = "今天的夕阳真美啊ABC"
        a = hashed_embed(seq, window=2, dim=64, backend="numba")
        b = hashed_embed(seq, window=2, dim=64, backend="numpy")
        assert a.tobytes() == b.tobytes()

    def test_window_zero_position_independent(self):
        vectors = hashed_embed("ABA", window=0, dim=8)
        np.testing.assert_array_equal(vectors[0], vectors[2])
        assert not np.array_equal(vectors[0], vectors[1])

    def test_deterministic(self):
        a = hashed_embed("他带着", window=2, dim=64)
        b = hashed_embed("他带着", window=2, dim=64)
        assert a.tobytes() == b.tobytes()

    def test_locality(self):
        # editing position p only moves vectors within the window
        base = hashed_embed("ABCDEFGH", window=2, dim=32)
        edited = hashed_embed("ABCXEFGH", window=2, dim=32)
        for j in range(8):
            if abs(j - 3) <= 2:
                assert not np.array_equal(base[j], edited[j])
            else:
                np.testing.assert_array_equal(base[j], edited[j])

    def test_context_sensitivity(self):
        # same center character, different neighbor => different vector
        a = hashed_embed("XAY", window=1, dim=64)
        b = hashed_embed("XAZ", window=1, dim=64)
        assert not np.array_equal(a[1], b[1])

    def test_empty_sequence(self):
        assert hashed_embed("", window=2, dim=8).shape == (0, 8)

    def test_validation(self):
        with pytest.raises(ValueError):
            hashed_embed("A", window=-1, dim=8)
        with pytest.raises(ValueError):
            hashed_embed("A", window=0, dim=1)
        with pytest.raises(ValueError):
            hashed_embed("A", window=128, dim=8)


# ===========================================================================
# embed_corpus
# ===========================================================================

class TestEmbedCorpus:

    def test_empty_corpus(self):
        corpus = parse_corpus("")
        assert embed_corpus(corpus, HashedEmbedder()) == {}

    def test_shapes(self):
        corpus = parse_corpus("s1\tABCDE\tABCDX\n")
        table = embed_corpus(corpus, HashedEmbedder(window=2, dim=16))
        assert set(table) == {("s1", "source"), ("s1", "target")}
        assert len(table[("s1", "source")]) == 5
        assert table[("s1", "target")].dim == 16

    def test_deterministic(self):
        corpus = parse_corpus("s1\t他带着\t他戴着\n")
        t1 = embed_corpus(corpus, HashedEmbedder())
        t2 = embed_corpus(corpus, HashedEmbedder())
        for key in t1:
            assert t1[key].vectors.tobytes() == t2[key].vectors.tobytes()


# ===========================================================================
# embedding file
# ===========================================================================

EMB_DOC = (
    "dim=2\n"
    "s1\tsource\t0\t1.0,0.0\n"
    "s1\tsource\t1\t0.5,-0.25\n"
    "s1\ttarget\t0\t0.0,1.0\n"
    "s1\ttarget\t1\t-1.0,0.0\n"
)


class TestEmbeddingFile:

    def test_parse(self):
        table = parse_embeddings(EMB_DOC)
        emb = table[("s1", "source")]
        assert len(emb) == 2 and emb.dim == 2
        np.testing.assert_array_equal(emb.vectors[1], [0.5, -0.25])

    def test_position_gap(self):
        doc = "dim=2\ns1\tsource\t0\t1.0,0.0\ns1\tsource\t2\t0.0,1.0\n"
        with pytest.raises(MissingPosition):
            parse_embeddings(doc)

    def test_dim_mismatch(self):
        doc = "dim=2\ns1\tsource\t0\t1.0,2.0,3.0\n"
        with pytest.raises(DimMismatch):
            parse_embeddings(doc)

    def test_bad_header(self):
        with pytest.raises(MalformedLine):
            parse_embeddings("s1\tsource\t0\t1.0\n")

    def test_bad_side(self):
        with pytest.raises(MalformedLine):
            parse_embeddings("dim=1\ns1\tmiddle\t0\t1.0\n")

    def test_duplicate_position(self):
        doc = "dim=1\ns1\tsource\t0\t1.0\ns1\tsource\t0\t2.0\n"
        with pytest.raises(MalformedLine):
            parse_embeddings(doc)

    def test_roundtrip(self, tmp_path):
        table = parse_embeddings(EMB_DOC)
        text = embeddings_to_text(table, dim=2)
        again = parse_embeddings(text)
        for key in table:
            assert table[key].vectors.tobytes() == again[key].vectors.tobytes()

    def test_file_provider(self, tmp_path):
        path = tmp_path / "emb.tsv"
        path.write_text(EMB_DOC, encoding="utf-8")
        provider = load_embeddings(path)
        corpus = parse_corpus("s1\tAB\tAC\n")
        table = embed_corpus(corpus, provider)
        np.testing.assert_array_equal(table[("s1", "target")].vectors[0], [0.0, 1.0])

    def test_file_provider_missing_sample(self, tmp_path):
        path = tmp_path / "emb.tsv"
        path.write_text(EMB_DOC, encoding="utf-8")
        provider = load_embeddings(path)
        corpus = parse_corpus("s2\tAB\tAC\n")
        with pytest.raises(MissingEmbedding):
            embed_corpus(corpus, provider)
