import numpy as np
import pytest
from hypothesis import given, strategies as st

from eventsum.corpus import Document, DocumentCluster
from eventsum.errors import FormatError, ValidationError
from eventsum.simgraph import (
    EmbeddingStore,
    SimilarityMatrix,
    load_embeddings,
    pairwise_variance,
    save_embeddings,
    sim,
    similarity_matrix,
)

finite_floats = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


def vec(*xs):
    return np.array(xs, dtype=np.float64)


class TestSim:
    def test_self_similarity(self):
        assert sim(vec(1, 2, 3), vec(1, 2, 3)) == 1.0

    def test_orthogonal(self):
        assert sim(vec(1, 0), vec(0, 1)) == 0.0

    def test_negative_cosine_clamped(self):
        # raw cosine is -1; clamp rule maps it to 0
        assert sim(vec(1, 0), vec(-1, 0)) == 0.0

    def test_zero_vector(self):
        assert sim(vec(0, 0), vec(1, 1)) == 0.0

    def test_dim_mismatch(self):
        with pytest.raises(ValidationError):
            sim(vec(1, 0), vec(1, 0, 0))

    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            sim(vec(np.nan, 0), vec(1, 0))

    @given(st.lists(finite_floats, min_size=1, max_size=6), st.data())
    def test_symmetric_and_bounded(self, a_list, data):
        a = np.array(a_list)
        b = np.array(data.draw(st.lists(finite_floats, min_size=len(a_list), max_size=len(a_list))))
        s = sim(a, b)
        assert s == sim(b, a)
        assert 0.0 <= s <= 1.0

    @given(
        st.lists(finite_floats, min_size=1, max_size=6),
        st.floats(min_value=0.01, max_value=100, allow_nan=False),
    )
    def test_scale_invariance(self, a_list, scale):
        a = np.array(a_list)
        b = np.arange(1.0, len(a) + 1.0)
        # tolerance covers precision loss for components near the subnormal range
        assert sim(a * scale, b) == pytest.approx(sim(a, b), abs=1e-9)


class TestSimilarityMatrix:
    def make_cluster(self, n):
        return DocumentCluster(
            cluster_id="c", documents=(Document("d", tuple(f"s{i}." for i in range(n))),)
        )

    def test_single_sentence(self):
        cluster = self.make_cluster(1)
        store = EmbeddingStore(dim=2, entries={"c/0/0": vec(3, 4)})
        mat = similarity_matrix(cluster, store)
        assert mat.values.tolist() == [[1.0]]

    def test_identical_embeddings(self):
        cluster = self.make_cluster(2)
        store = EmbeddingStore(dim=2, entries={"c/0/0": vec(1, 2), "c/0/1": vec(2, 4)})
        mat = similarity_matrix(cluster, store)
        assert mat.values[0, 1] == pytest.approx(1.0)

    def test_matches_per_pair_evaluation(self):
        cluster = self.make_cluster(3)
        vs = [vec(1, 0, 0), vec(1, 1, 0), vec(-1, 0.2, 0)]
        store = EmbeddingStore(dim=3, entries={f"c/0/{i}": v for i, v in enumerate(vs)})
        mat = similarity_matrix(cluster, store)
        for i in range(3):
            for j in range(3):
                assert mat.values[i, j] == pytest.approx(sim(vs[i], vs[j]))
        # structural invariants
        assert np.array_equal(mat.values, mat.values.T)

    def test_missing_key(self):
        cluster = self.make_cluster(2)
        store = EmbeddingStore(dim=2, entries={"c/0/0": vec(1, 0)})
        with pytest.raises(ValidationError):
            similarity_matrix(cluster, store)

    def test_invariants_on_random_stores(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(1, 7))
            cluster = self.make_cluster(n)
            store = EmbeddingStore(
                dim=4, entries={f"c/0/{i}": rng.normal(0, 1, 4) for i in range(n)}
            )
            mat = similarity_matrix(cluster, store)  # constructor re-validates
            assert np.all(np.diag(mat.values) == 1.0)


class TestPairwiseVariance:
    def test_constant_offdiagonal(self):
        values = np.full((4, 4), 0.5)
        np.fill_diagonal(values, 1.0)
        assert pairwise_variance(SimilarityMatrix(n=4, values=values)) == 0.0

    def test_hand_arithmetic(self):
        # distinct pairs (0.2, 0.4, 0.4): mean 1/3, population variance 2/225
        values = np.array([[1.0, 0.2, 0.4], [0.2, 1.0, 0.4], [0.4, 0.4, 1.0]])
        assert pairwise_variance(SimilarityMatrix(n=3, values=values)) == pytest.approx(2.0 / 225.0)

    def test_mean_point_three_case(self):
        # distinct pairs (0.2, 0.4, 0.3): mean 0.3, variance (0.01 + 0.01 + 0)/3
        values = np.array([[1.0, 0.2, 0.4], [0.2, 1.0, 0.3], [0.4, 0.3, 1.0]])
        assert pairwise_variance(SimilarityMatrix(n=3, values=values)) == pytest.approx(0.02 / 3.0)

    def test_single_pair_is_zero(self):
        m = np.array([[1.0, 0.5], [0.5, 1.0]])
        assert pairwise_variance(SimilarityMatrix(n=2, values=m)) == 0.0

    def test_singleton_matrix_rejected(self):
        with pytest.raises(ValidationError):
            pairwise_variance(SimilarityMatrix(n=1, values=np.array([[1.0]])))

    def test_permutation_invariant(self):
        rng = np.random.default_rng(5)
        a = rng.uniform(0, 1, (5, 5))
        values = np.clip((a + a.T) / 2, 0, 1)
        np.fill_diagonal(values, 1.0)
        mat = SimilarityMatrix(n=5, values=values)
        perm = rng.permutation(5)
        permuted = SimilarityMatrix(n=5, values=values[np.ix_(perm, perm)])
        assert pairwise_variance(mat) == pytest.approx(pairwise_variance(permuted), abs=1e-15)


class TestSembFormat:
    def make_store(self, rng, count, dim):
        entries = {
            f"key/{i}": rng.normal(0, 1, dim).astype(np.float32).astype(np.float64)
            for i in range(count)
        }
        return EmbeddingStore(dim=dim, entries=entries)

    def test_header_echo(self, tmp_path):
        store = self.make_store(np.random.default_rng(1), 3, 4)
        path = tmp_path / "e.semb"
        save_embeddings(store, path)
        loaded = load_embeddings(path)
        assert len(loaded) == 3 and loaded.dim == 4

    def test_round_trip_bit_identical(self, tmp_path):
        store = self.make_store(np.random.default_rng(2), 5, 7)
        path = tmp_path / "e.semb"
        save_embeddings(store, path)
        loaded = load_embeddings(path)
        for key, v in store.entries.items():
            assert np.array_equal(loaded.entries[key], v)

    def test_truncated_payload(self, tmp_path):
        store = self.make_store(np.random.default_rng(3), 4, 4)
        path = tmp_path / "e.semb"
        save_embeddings(store, path)
        data = path.read_bytes()
        (tmp_path / "cut.semb").write_bytes(data[:-5])
        with pytest.raises(FormatError):
            load_embeddings(tmp_path / "cut.semb")

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.semb"
        path.write_bytes(b"XXXX" + bytes(20))
        with pytest.raises(FormatError):
            load_embeddings(path)

    def test_bad_version(self, tmp_path):
        store = self.make_store(np.random.default_rng(4), 1, 2)
        path = tmp_path / "e.semb"
        save_embeddings(store, path)
        data = bytearray(path.read_bytes())
        data[4] = 9
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError):
            load_embeddings(path)

    def test_trailing_bytes_rejected(self, tmp_path):
        store = self.make_store(np.random.default_rng(5), 2, 3)
        path = tmp_path / "e.semb"
        save_embeddings(store, path)
        path.write_bytes(path.read_bytes() + b"junk")
        with pytest.raises(FormatError):
            load_embeddings(path)
