"""Clustering-driven block-constant correlation estimators.

Comparison methods: cluster the variables, then replace every
cluster-pair block of the sample correlation by its mean value.
"""

import numpy as np

from ._rng import STREAM_KMEANS, substream


def block_constant_estimator(R, labels):
    """Block-wise constant estimate of a correlation matrix.

    Cross-cluster blocks get the mean of R over all their pairs; within
    blocks the mean over off-diagonal pairs; the diagonal stays 1.
    Singleton clusters have no off-diagonal pairs, so their within value
    is vacuous.
    """
    R = np.asarray(R, dtype=float)
    labels = np.asarray(labels, dtype=int)
    q = R.shape[0]
    if R.ndim != 2 or R.shape[1] != q:
        raise ValueError(f"correlation matrix must be square, got shape {R.shape}")
    if labels.shape != (q,):
        raise ValueError(f"need {q} labels, got shape {labels.shape}")
    if labels.min() < 0:
        raise ValueError("labels must be non-negative")
    k = int(labels.max()) + 1
    counts = np.bincount(labels, minlength=k)
    if np.any(counts == 0):
        raise ValueError(f"empty cluster {int(np.flatnonzero(counts == 0)[0])}")
    onehot = np.zeros((q, k))
    onehot[np.arange(q), labels] = 1.0
    block_sum = onehot.T @ R @ onehot
    rho = block_sum / np.outer(counts, counts)
    diag_sum = np.bincount(labels, weights=np.diag(R), minlength=k)
    within_pairs = counts * (counts - 1)
    for c in range(k):
        if within_pairs[c] > 0:
            rho[c, c] = (block_sum[c, c] - diag_sum[c]) / within_pairs[c]
        else:
            rho[c, c] = 0.0  # vacuous, overwritten by the unit diagonal below
    out = onehot @ rho @ onehot.T
    out = (out + out.T) / 2
    np.fill_diagonal(out, 1.0)
    return out


def kmeans_columns(X, k, seed=0, n_init=10, max_iter=100):
    """Cluster the columns of ``X`` with Lloyd's algorithm.

    Each of the ``n_init`` restarts starts from k distinct columns drawn
    without replacement from its own substream; the clustering with the
    smallest within-cluster sum of squares wins, ties keeping the earliest
    restart. Clusters emptied during an update are re-seeded with the
    point farthest from its assigned centroid.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"observations must be a 2-d array, got shape {X.shape}")
    pts = np.ascontiguousarray(X.T)
    q = pts.shape[0]
    if not 1 <= k <= q:
        raise ValueError(f"k must be in [1, {q}], got {k}")
    n_distinct = np.unique(pts, axis=0).shape[0]
    if k > n_distinct:
        raise ValueError(f"k={k} exceeds the {n_distinct} distinct columns")
    best_labels = None
    best_wcss = np.inf
    for restart in range(n_init):
        rng = substream(seed, STREAM_KMEANS, restart)
        centroids = pts[rng.choice(q, size=k, replace=False)].copy()
        labels = None
        for _ in range(max_iter):
            d2 = _sq_distances(pts, centroids)
            new_labels = d2.argmin(axis=1)
            for c in range(k):
                if not np.any(new_labels == c):
                    far = int(d2[np.arange(q), new_labels].argmax())
                    new_labels[far] = c
                    d2[far] = 0.0  # no longer a candidate for other reseeds
            if labels is not None and np.array_equal(new_labels, labels):
                break
            labels = new_labels
            for c in range(k):
                centroids[c] = pts[labels == c].mean(axis=0)
        wcss = float(((pts - centroids[labels]) ** 2).sum())
        if wcss < best_wcss:
            best_wcss = wcss
            best_labels = labels.copy()
    return best_labels


def _sq_distances(pts, centroids):
    d2 = ((pts ** 2).sum(axis=1)[:, None] + (centroids ** 2).sum(axis=1)[None, :]
          - 2.0 * pts @ centroids.T)
    return np.maximum(d2, 0.0)
