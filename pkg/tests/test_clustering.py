import warnings

import numpy as np
import pytest

from causal_elicit.clustering import (
    ClusterModel,
    l2_normalize,
    l2_normalize_rows,
    minibatch_kmeans,
    representatives,
)
from causal_elicit.errors import BadK, DegenerateEmbedding, EmptyCluster

from oracles import lloyd_kmeans


def test_l2_normalize_examples():
    np.testing.assert_allclose(l2_normalize(np.array([3.0, 4.0])), [0.6, 0.8])
    np.testing.assert_allclose(l2_normalize(np.array([1.0, 0.0, 0.0])), [1, 0, 0])
    with pytest.warns(DegenerateEmbedding):
        out = l2_normalize(np.array([0.0, 0.0]))
    np.testing.assert_array_equal(out, [0.0, 0.0])


def test_l2_normalize_rows():
    H = l2_normalize_rows(np.array([[3.0, 4.0], [0.0, 2.0]]))
    np.testing.assert_allclose(H, [[0.6, 0.8], [0.0, 1.0]])


def test_k_equals_m_gives_singletons():
    rng = np.random.default_rng(0)
    H = l2_normalize_rows(rng.normal(size=(5, 8)))
    model = minibatch_kmeans(H, 5, seed=1)
    assert model.K == 5
    assert sorted(model.labels.tolist()) == [0, 1, 2, 3, 4]


def test_two_separated_groups_match_exact_lloyd():
    rng = np.random.default_rng(11)
    a = rng.normal(scale=0.05, size=(10, 4)) + [1, 0, 0, 0]
    b = rng.normal(scale=0.05, size=(10, 4)) + [0, 0, 1, 0]
    H = l2_normalize_rows(np.vstack([a, b]))
    model = minibatch_kmeans(H, 2, seed=0)

    oracle = lloyd_kmeans(H, H[[0, 10]])
    assert oracle.tolist() == [0] * 10 + [1] * 10
    # same partition up to relabeling
    same = (model.labels[:, None] == model.labels[None, :])
    assert (same == (oracle[:, None] == oracle[None, :])).all()


def test_same_seed_same_result():
    H = l2_normalize_rows(np.random.default_rng(2).normal(size=(60, 6)))
    a = minibatch_kmeans(H, 7, seed=9)
    b = minibatch_kmeans(H, 7, seed=9)
    np.testing.assert_array_equal(a.labels, b.labels)
    np.testing.assert_array_equal(a.centroids, b.centroids)


def test_labels_are_contiguous_and_nonempty():
    # duplicate points make some of the 10 requested centers redundant
    H = l2_normalize_rows(np.repeat(np.eye(3), 4, axis=0))
    model = minibatch_kmeans(H, 10, seed=0)
    assert model.K == len(np.unique(model.labels))
    assert set(model.labels.tolist()) == set(range(model.K))


def test_k_min_rule():
    H = l2_normalize_rows(np.random.default_rng(4).normal(size=(12, 5)))
    assert minibatch_kmeans(H, min(30, len(H)), seed=0).K == 12


@pytest.mark.parametrize("K", [0, 6])
def test_bad_k(K):
    with pytest.raises(BadK):
        minibatch_kmeans(np.eye(5), K)


def test_representatives_singleton():
    model = ClusterModel(K=2, labels=np.array([0, 1, 0]), centroids=np.eye(2), seed=0, n_epochs=1)
    H = np.array([[1.0, 0.0], [0.0, 1.0], [0.9, 0.1]])
    assert representatives(model, H, ["a", "b", "c"], 1, m=5) == ["b"]


def test_representatives_match_bruteforce_cosine_sort():
    U = ["p", "q", "r", "s"]
    H = l2_normalize_rows(np.array([[1.0, 0.2], [1.0, 0.9], [1.0, 0.0], [0.0, 1.0]]))
    centroid = l2_normalize(np.array([1.0, 0.1]))
    model = ClusterModel(K=2, labels=np.array([0, 0, 0, 1]),
                         centroids=np.vstack([centroid, [0.0, 1.0]]), seed=0, n_epochs=1)

    members = [0, 1, 2]
    cos = {k: H[k] @ centroid / (np.linalg.norm(H[k]) * np.linalg.norm(centroid)) for k in members}
    expected = [U[k] for k in sorted(members, key=lambda k: -cos[k])]
    assert representatives(model, H, U, 0, m=5) == expected
    assert representatives(model, H, U, 0, m=2) == expected[:2]


def test_representative_ties_go_to_lower_index():
    H = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
    model = ClusterModel(K=1, labels=np.zeros(3, dtype=int), centroids=np.array([[1.0, 0.0]]),
                         seed=0, n_epochs=1)
    assert representatives(model, H, ["x", "y", "z"], 0, m=2) == ["x", "y"]


def test_empty_cluster_raises():
    model = ClusterModel(K=2, labels=np.array([0, 0]), centroids=np.eye(2), seed=0, n_epochs=1)
    with pytest.raises(EmptyCluster):
        representatives(model, np.eye(2), ["a", "b"], 1)


def test_no_warning_on_clean_rows():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        l2_normalize_rows(np.ones((3, 3)))
