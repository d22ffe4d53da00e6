import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from texttab.embedding import (EmbeddingError, SignalWeights, VectorStore,
                               cosine_distance, embed_attribute, embed_nugget,
                               embed_tokens, load_label_map, load_vector_store,
                               save_vector_store, tokenize,
                               tokenize_attribute_name)
from texttab.extraction import Nugget


def store2d(**entries):
    return VectorStore(entries)


def make_nugget(mention="airline", context="", label="ORG", position=0.0):
    return Nugget(id="d#0-1#X", document_id="d", label=label, mention=mention,
                  mention_span=(0, len(mention) or 1),
                  context_sentence=context or mention, position=position)


unit_vectors = st.integers(2, 6).flatmap(
    lambda d: st.lists(st.floats(-1, 1, allow_nan=False), min_size=d, max_size=d)
    .filter(lambda v: sum(x * x for x in v) > 1e-6)
    .map(lambda v: np.array(v) / np.linalg.norm(v)))


class TestLoadVectorStore:
    def test_basic_parse(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("a 1 0\nb 0 1\n")
        store = load_vector_store(path)
        assert len(store) == 2 and store.dimension == 2

    def test_header_skipped(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("2 3\na 1 0 0\nb 0 1 0\n")
        store = load_vector_store(path)
        assert store.dimension == 3

    def test_inconsistent_dimension(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("a 1 0\nb 0 1 2\n")
        with pytest.raises(EmbeddingError, match=":2"):
            load_vector_store(path)

    def test_non_numeric(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("a 1 zzz\n")
        with pytest.raises(EmbeddingError, match="non-numeric"):
            load_vector_store(path)

    def test_empty_store(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("")
        with pytest.raises(EmbeddingError, match="empty store"):
            load_vector_store(path)

    def test_save_round_trip(self, tmp_path):
        store = store2d(a=(1.0, 0.0), b=(0.25, -0.75))
        path = tmp_path / "v.txt"
        save_vector_store(store, path)
        again = load_vector_store(path)
        assert np.array_equal(again.get("b"), store.get("b"))


class TestEmbedTokens:
    def test_single_token(self):
        vec = embed_tokens(["airline"], store2d(airline=(1, 0)))
        assert np.allclose(vec, [1, 0])

    def test_mean_then_normalize(self):
        vec = embed_tokens(["airline", "incident"],
                           store2d(airline=(1, 0), incident=(0, 1)))
        assert np.allclose(vec, [0.70711, 0.70711], atol=1e-5)

    def test_all_oov(self):
        assert embed_tokens(["zzz"], store2d(airline=(1, 0))) is None

    def test_case_insensitive(self):
        vec = embed_tokens(["AIRLINE"], store2d(airline=(1, 0)))
        assert vec is not None

    @given(st.permutations(["a", "b", "c", "q"]))
    def test_permutation_invariant(self, tokens):
        store = store2d(a=(1, 0, 0), b=(0, 1, 0), c=(1, 1, 1))
        vec = embed_tokens(tokens, store)
        ref = embed_tokens(["a", "b", "c", "q"], store)
        assert np.allclose(vec, ref)


class TestEmbedNugget:
    def test_two_identical_signals(self):
        store = store2d(airline=(1, 0))
        n = make_nugget(mention="airline", context="airline")
        vec = embed_nugget(n, store, {"ORG": "airline"}, SignalWeights(1, 1, 1, 0))
        assert np.allclose(vec, [1, 0])

    def test_all_oov(self):
        n = make_nugget(mention="zzz", context="yyy", label="QQ")
        assert embed_nugget(n, store2d(airline=(1, 0)), {}, SignalWeights()) is None

    def test_weighted_sum_hand_computed(self):
        store = store2d(plane=(1, 0), vehicle=(0, 1))
        n = make_nugget(mention="plane", context="plane", label="VEH")
        w = SignalWeights(1, 1, 0, 0)
        vec = embed_nugget(n, store, {"VEH": "vehicle"}, w)
        # brute-force recomputation: 1*(0,1) + 1*(1,0), normalized
        expected = np.array([1.0, 1.0]) / math.sqrt(2)
        assert np.allclose(vec, expected)
        assert np.allclose(vec, [0.70711, 0.70711], atol=1e-5)

    def test_position_coordinate(self):
        store = store2d(plane=(1, 0))
        n = make_nugget(mention="plane", context="plane", position=0.5)
        w = SignalWeights(0, 1, 0, w_position=2.0)
        vec = embed_nugget(n, store, {}, w)
        assert vec.shape == (3,)
        # pre-normalization vector is (1, 0, 2*0.5)
        assert np.allclose(vec, np.array([1, 0, 1]) / math.sqrt(2))

    def test_unit_norm(self):
        store = store2d(plane=(3, 4), sky=(-1, 2))
        n = make_nugget(mention="plane", context="plane in sky")
        vec = embed_nugget(n, store, {}, SignalWeights())
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-9

    @given(st.floats(0.001, 1000))
    def test_weight_scaling_invariance(self, scale):
        store = store2d(plane=(1, 0.5), sky=(-0.3, 2))
        n = make_nugget(mention="plane", context="plane in sky", position=0.7)
        base = SignalWeights(1, 2, 0.5, 0.25)
        scaled = SignalWeights(scale, 2 * scale, 0.5 * scale, 0.25 * scale)
        a = embed_nugget(n, store, {}, base)
        b = embed_nugget(n, store, {}, scaled)
        assert np.allclose(a, b, atol=1e-9)


class TestEmbedAttribute:
    def test_single_word(self):
        vec = embed_attribute("airline", store2d(airline=(1, 0)), SignalWeights())
        assert np.allclose(vec, [1, 0])

    def test_underscore_split(self):
        vec = embed_attribute("departure_city",
                              store2d(departure=(1, 0), city=(0, 1)), SignalWeights())
        assert np.allclose(vec, [0.70711, 0.70711], atol=1e-5)

    def test_camel_case_split(self):
        assert tokenize_attribute_name("departureCity") == ["departure", "city"]
        assert tokenize_attribute_name("NTSBReportID") == ["ntsb", "report", "id"]

    def test_fully_oov(self):
        assert embed_attribute("qqq", store2d(airline=(1, 0)), SignalWeights()) is None

    def test_position_padding(self):
        w = SignalWeights(w_position=1.0)
        vec = embed_attribute("airline", store2d(airline=(1, 0)), w)
        assert vec.shape == (3,)
        assert vec[2] == 0.0
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-9


class TestCosineDistance:
    def test_identity(self):
        a = np.array([1.0, 0.0])
        assert cosine_distance(a, a) == 0.0

    def test_orthogonal(self):
        assert cosine_distance(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0

    def test_45_degrees(self):
        b = np.array([0.70711, 0.70711])
        b = b / np.linalg.norm(b)
        assert abs(cosine_distance(np.array([1.0, 0.0]), b) - 0.29289) < 1e-5

    def test_dimension_mismatch(self):
        with pytest.raises(EmbeddingError, match="mismatch"):
            cosine_distance(np.array([1.0, 0.0]), np.array([1.0, 0.0, 0.0]))

    @given(unit_vectors)
    def test_self_distance_zero(self, a):
        assert abs(cosine_distance(a, a)) < 1e-9

    @given(st.tuples(unit_vectors, unit_vectors).filter(
        lambda ab: ab[0].shape == ab[1].shape))
    def test_symmetry_and_range(self, ab):
        a, b = ab
        assert abs(cosine_distance(a, b) - cosine_distance(b, a)) < 1e-12
        assert -1e-9 <= cosine_distance(a, b) <= 2 + 1e-9


class TestLabelMap:
    def test_parse(self, tmp_path):
        path = tmp_path / "labels.conf"
        path.write_text("# comment\nORG = organization company\nGPE = city country\n")
        labels = load_label_map(path)
        assert labels == {"ORG": "organization company", "GPE": "city country"}

    def test_empty_phrase_rejected(self, tmp_path):
        path = tmp_path / "labels.conf"
        path.write_text("ORG =\n")
        with pytest.raises(EmbeddingError, match="empty phrase"):
            load_label_map(path)


class TestTokenize:
    def test_non_alnum_split(self):
        assert tokenize("US-Airways, flight #11!") == ["us", "airways", "flight", "11"]
