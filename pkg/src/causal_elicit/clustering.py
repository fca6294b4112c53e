"""Embedding normalization, mini-batch k-means and centroid-nearest examples."""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BadK, DegenerateEmbedding, EmptyCluster

NORM_EPS = 1e-12


def l2_normalize(v):
    """Return ``v / ||v||``; zero vectors come back unchanged with a warning."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm <= NORM_EPS:
        warnings.warn("zero-norm embedding left unnormalized", DegenerateEmbedding, stacklevel=2)
        return v.copy()
    return v / norm


def l2_normalize_rows(H):
    H = np.asarray(H, dtype=float)
    norms = np.linalg.norm(H, axis=1, keepdims=True)
    bad = norms[:, 0] <= NORM_EPS
    if bad.any():
        warnings.warn(
            f"{int(bad.sum())} zero-norm embeddings left unnormalized",
            DegenerateEmbedding,
            stacklevel=2,
        )
    norms[bad] = 1.0
    return H / norms


@dataclass
class ClusterModel:
    K: int
    labels: np.ndarray
    centroids: np.ndarray
    seed: int
    n_epochs: int = 0


def _sq_dists(H, C):
    return (H * H).sum(1)[:, None] - 2.0 * H @ C.T + (C * C).sum(1)[None, :]


def _kmeanspp(H, K, rng):
    M = len(H)
    centers = [int(rng.integers(M))]
    d2 = ((H - H[centers[0]]) ** 2).sum(1)
    for _ in range(1, K):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(M))
        else:
            idx = int(rng.choice(M, p=d2 / total))
        centers.append(idx)
        d2 = np.minimum(d2, ((H - H[idx]) ** 2).sum(1))
    return H[centers].copy()


def minibatch_kmeans(H, K, seed=0, batch_size=256, max_epochs=100, tol=1e-4):
    """Mini-batch k-means (per-center learning rate 1/count) with k-means++ seeding.

    Clusters that end up with no members are dropped, so ``model.K`` can be
    smaller than the requested ``K``. Deterministic for fixed ``(H, K, seed)``.
    """
    H = np.asarray(H, dtype=float)
    M = len(H)
    if K < 1 or K > M:
        raise BadK(f"K={K} must be in [1, {M}]")
    rng = np.random.default_rng(seed)
    C = _kmeanspp(H, K, rng)
    counts = np.zeros(K)
    b = min(batch_size, M)

    epoch = 0
    for epoch in range(1, max_epochs + 1):
        start = C.copy()
        order = rng.permutation(M)
        for lo in range(0, M, b):
            batch = H[order[lo : lo + b]]
            assign = _sq_dists(batch, C).argmin(1)
            for x, c in zip(batch, assign):
                counts[c] += 1.0
                C[c] += (x - C[c]) / counts[c]
        if np.sqrt(((C - start) ** 2).sum(1)).max() < tol:
            break

    labels = _sq_dists(H, C).argmin(1)
    used = np.unique(labels)
    remap = np.full(K, -1)
    remap[used] = np.arange(len(used))
    return ClusterModel(
        K=len(used), labels=remap[labels], centroids=C[used], seed=seed, n_epochs=epoch
    )


def representatives(model, H, U, c, m=5):
    """Up to ``m`` members of cluster ``c`` nearest its centroid (by inner product).

    ``U`` is the vocabulary (anything indexable by position); ties go to the
    earlier vocabulary entry.
    """
    idx = np.flatnonzero(model.labels == c)
    if len(idx) == 0:
        raise EmptyCluster(f"cluster {c} has no members")
    scores = np.asarray(H)[idx] @ model.centroids[c]
    ranked = idx[np.lexsort((idx, -scores))]
    return [U[i] for i in ranked[:m]]
