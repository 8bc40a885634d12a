import numpy as np
import pytest
from scipy import sparse

from cfmvc.config import SolverConfig
from cfmvc.exceptions import ConfigError, DeadAnchorWarning, DegenerateAnchorWarning, DomainError
from cfmvc.graph import (anchor_count, anchor_embedding, build_anchor_graph, butterworth_distance,
                         doubly_stochastic, euclidean_distance, lite_kmeans, select_anchors,
                         similarity_floor, view_distances)
from cfmvc.toys import gen_blobs
from oracles import project_simplex


class TestLiteKmeans:

    def test_separated_points(self):
        x = np.array([[0.0], [0.1], [10.0], [10.1]])
        labels, centers = lite_kmeans(x, 2, seed=0)
        assert labels[0] == labels[1] != labels[2] == labels[3]
        np.testing.assert_allclose(np.sort(centers.ravel()), [0.05, 10.05])

    def test_deterministic(self, rng):
        x = rng.normal(size=(50, 3))
        a, _ = lite_kmeans(x, 4, seed=11)
        b, _ = lite_kmeans(x, 4, seed=11)
        np.testing.assert_array_equal(a, b)

    def test_too_many_clusters(self):
        with pytest.raises(DomainError):
            lite_kmeans(np.zeros((3, 2)), 4, seed=0)


class TestAnchors:

    @pytest.mark.parametrize('theta,n,expected', [(10, 100, 10), (0.5, 200, 100), (1.0, 37, 37),
                                                  (0.001, 50, 1)])
    def test_anchor_count(self, theta, n, expected):
        assert anchor_count(theta, n) == expected

    def test_anchor_ratio_out_of_range(self):
        with pytest.raises(DomainError):
            anchor_count(1.5, 10)

    def test_all_samples_are_anchors(self, rng):
        x = rng.normal(size=(12, 2))
        anchors = select_anchors(x, 12, seed=3)
        assert anchors.shape == (12, 2)
        # a permutation of the samples
        np.testing.assert_array_equal(np.sort(anchors, axis=0), np.sort(x, axis=0))

    def test_anchor_selection_is_seeded(self, rng):
        x = rng.normal(size=(60, 2))
        np.testing.assert_array_equal(select_anchors(x, 6, seed=1), select_anchors(x, 6, seed=1))

    @pytest.mark.parametrize('theta', [0, 13])
    def test_anchor_count_outside_range(self, rng, theta):
        with pytest.raises(DomainError):
            select_anchors(rng.normal(size=(12, 2)), theta, seed=0)

    def test_fewer_anchors_than_clusters(self, rng):
        with pytest.raises(DomainError):
            select_anchors(rng.normal(size=(12, 2)), 2, seed=0, c=3)

    def test_single_anchor_is_the_mean(self, rng):
        x = rng.normal(size=(30, 3))
        np.testing.assert_allclose(select_anchors(x, 1, seed=0)[0], x.mean(axis=0), atol=1e-9)

    def test_one_anchor_per_blob(self):
        ds = gen_blobs(60, 2, separation=20.0, seed=4)
        x = ds.views[0]
        anchors = select_anchors(x, 2, seed=0, c=2)
        for k in range(2):
            blob = x[ds.truth == k]
            inside = ((anchors >= blob.min(axis=0)) & (anchors <= blob.max(axis=0))).all(axis=1)
            assert inside.sum() == 1


class TestAnchorGraph:

    def test_closed_form_weights(self):
        x = np.array([[0.0]])
        anchors = np.array([[1.0], [2.0], [3.0]])
        b = build_anchor_graph(x, anchors, k=2)
        # squared distances 1, 4, 9: weights (9 - 1) / 13 and (9 - 4) / 13
        np.testing.assert_allclose(b.toarray(), [[8 / 13, 5 / 13, 0.0]])

    def test_rows_are_stochastic_and_sparse(self, rng):
        x = rng.normal(size=(40, 3))
        anchors = select_anchors(x, 10, seed=0)
        b = build_anchor_graph(x, anchors, k=4)
        assert isinstance(b, sparse.csr_array)
        np.testing.assert_allclose(b.sum(axis=1), 1.0, atol=1e-12)
        assert (np.diff(b.indptr) <= 4).all()
        assert (b.data >= 0).all()

    def test_weights_match_simplex_projection(self, rng):
        x = rng.normal(size=(20, 2))
        anchors = rng.normal(size=(8, 2))
        k = 3
        b = build_anchor_graph(x, anchors, k).toarray()
        for i in range(x.shape[0]):
            delta = np.sum((anchors - x[i]) ** 2, axis=1)
            nearest = np.argsort(delta, kind='stable')
            d = delta[nearest[:k + 1]]
            gamma = (k * d[k] - d[:k].sum()) / 2
            expected = np.zeros(8)
            expected[nearest[:k]] = project_simplex(-d[:k] / (2 * gamma))
            np.testing.assert_allclose(b[i], expected, atol=1e-12)

    def test_equidistant_anchors_warn(self):
        x = np.array([[0.0, 0.0], [5.0, 0.0]])
        anchors = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [5.0, 1.0]])
        with pytest.warns(DegenerateAnchorWarning):
            b = build_anchor_graph(x, anchors, k=2)
        np.testing.assert_allclose(b.toarray()[0], [0.5, 0.5, 0.0, 0.0])

    @pytest.mark.parametrize('k', [0, 4])
    def test_k_outside_range(self, rng, k):
        with pytest.raises(DomainError):
            build_anchor_graph(rng.normal(size=(5, 2)), rng.normal(size=(4, 2)), k)


class TestSimilarity:

    def test_doubly_stochastic(self, rng):
        x = rng.normal(size=(30, 2))
        b = build_anchor_graph(x, select_anchors(x, 8, seed=0), k=3)
        w = doubly_stochastic(b)
        np.testing.assert_allclose(w, w.T, atol=1e-14)
        np.testing.assert_allclose(w.sum(axis=1), 1.0, atol=1e-12)
        assert (w >= 0).all()

    def test_matches_dense_formula(self, rng):
        b = rng.uniform(size=(8, 3))
        b /= b.sum(axis=1, keepdims=True)
        expected = b @ np.diag(1 / b.sum(axis=0)) @ b.T
        np.testing.assert_allclose(doubly_stochastic(b), expected, atol=1e-14)

    def test_identity_graph(self):
        np.testing.assert_array_equal(doubly_stochastic(np.eye(4)), np.eye(4))

    def test_uniform_graph(self):
        w = doubly_stochastic(np.full((6, 3), 1 / 3))
        np.testing.assert_allclose(w, 1 / 6, atol=1e-15)

    def test_dead_anchor_dropped(self):
        b = np.array([[1.0, 0.0, 0.0], [0.5, 0.5, 0.0]])
        with pytest.warns(DeadAnchorWarning):
            w = doubly_stochastic(b)
        np.testing.assert_allclose(w.sum(axis=1), 1.0)


class TestDistances:

    def test_butterworth_values(self):
        w = np.array([[0.5, 0.01], [0.01, 0.5]])
        d = butterworth_distance(w, 0.01)
        np.testing.assert_allclose(d, [[0.0, np.sqrt(0.5)], [np.sqrt(0.5), 0.0]])

    def test_butterworth_saturates(self):
        w = np.array([[1.0, 0.0, 1e300], [0.0, 1.0, 0.0], [1e300, 0.0, 1.0]])
        d = butterworth_distance(w, 1e-3)
        assert d[0, 1] == 1.0
        assert d[0, 2] == 0.0
        assert np.isfinite(d).all()

    def test_butterworth_decreasing_in_similarity(self):
        w = np.linspace(0.0, 1.0, 50)[None, :]
        d = butterworth_distance(w, 0.1)[0, 1:]
        assert np.all(np.diff(d) < 0)

    def test_butterworth_at_twice_the_cutoff(self):
        d = butterworth_distance([[0.0, 0.02], [0.02, 0.0]], 0.01)
        np.testing.assert_allclose(d[0, 1], np.sqrt(1 / 17))

    def test_butterworth_grows_with_cutoff(self):
        w = np.array([[0.0, 0.01], [0.01, 0.0]])
        d = [butterworth_distance(w, omega)[0, 1] for omega in (1e-4, 1e-3, 1e-2, 1e-1)]
        assert np.all(np.diff(d) > 0)
        assert d[0] < 1e-3 and d[-1] > 0.999

    def test_butterworth_bad_omega(self):
        with pytest.raises(DomainError):
            butterworth_distance(np.eye(2), 0.0)

    def test_euclidean(self):
        d = euclidean_distance([[0.0, 0.0], [3.0, 4.0]])
        np.testing.assert_allclose(d, [[0.0, 25.0], [25.0, 0.0]])

    def test_euclidean_matches_double_loop(self, rng):
        x = rng.normal(size=(6, 3))
        x[4] = x[1]
        expected = np.array([[np.sum((a - b) ** 2) for b in x] for a in x])
        d = euclidean_distance(x)
        np.testing.assert_allclose(d, expected, atol=1e-10)
        assert d[1, 4] == 0.0

    def test_view_distances_butterworth(self, two_moon):
        graph = view_distances(two_moon.views[0], SolverConfig(), c=2)
        d = graph.distances
        assert d.shape == (200, 200)
        np.testing.assert_allclose(d, d.T, atol=1e-14)
        np.testing.assert_array_equal(np.diag(d), 0.0)
        assert ((d >= 0) & (d <= 1)).all()
        assert graph.anchor_graph.shape == (200, 100)

    def test_view_distances_euclidean(self, two_moon):
        graph = view_distances(two_moon.views[0], SolverConfig(distance='euclidean'))
        assert graph.anchor_graph is None
        np.testing.assert_allclose(graph.distances, euclidean_distance(two_moon.views[0]))

    @pytest.mark.parametrize('anchors,k_nn', [(5, 5), (1, 1)])
    def test_view_distances_bad_anchor_count(self, rng, anchors, k_nn):
        with pytest.raises(ConfigError):
            view_distances(rng.normal(size=(20, 2)), SolverConfig(anchors=anchors, k_nn=k_nn), c=2)

    def test_similarity_floor(self):
        w = np.array([[1.0, 0.3, 0.0], [0.3, 1.0, 0.2], [0.0, 0.2, 1.0]])
        assert similarity_floor(w, [0, 0, 1]) == 0.3
        with pytest.raises(DomainError):
            similarity_floor(w, [0, 1, 2])


    def test_intra_class_distances_saturate(self):
        # one anchor per blob: every intra-class pair shares its anchor
        ds = gen_blobs(80, 2, separation=20.0, seed=9)
        config = SolverConfig(anchors=2, k_nn=1)
        b = build_anchor_graph(ds.views[0], select_anchors(ds.views[0], 2, config.seed, 2), 1)
        omega = similarity_floor(doubly_stochastic(b), ds.truth) / 10
        d = view_distances(ds.views[0], config.model_copy(update={'omega': omega}), c=2).distances
        same = ds.truth[:, None] == ds.truth[None, :]
        np.fill_diagonal(same, False)
        assert d[same].max() / d[same].min() <= 1.05
        assert d[same].max() < 0.02
        np.testing.assert_array_equal(d[~same & ~np.eye(80, dtype=bool)], 1.0)


class TestEmbedding:

    def test_two_components_separate(self):
        # two groups of samples, each tied to its own pair of anchors
        b = np.zeros((6, 4))
        b[:3, :2] = 0.5
        b[3:, 2:] = 0.5
        emb = anchor_embedding(sparse.csr_array(b), 2)
        np.testing.assert_allclose(np.linalg.norm(emb, axis=1), 1.0)
        np.testing.assert_allclose(emb[0], emb[1], atol=1e-12)
        assert abs(emb[0] @ emb[3]) < 1e-12
